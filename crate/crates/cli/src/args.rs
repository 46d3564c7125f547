use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "bhclone",
    version,
    about = "Entanglement, Bell-CHSH and teleportation analysis of Buzek-Hillery clones"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Every quantity at one (xi, alpha^2) point.
    Analyze(AnalyzeArgs),
    /// Table of every quantity over a grid of points.
    Sweep(SweepArgs),
    /// Classified region map, closed forms against oracles.
    Regions(RegionsArgs),
    /// Bisection for the CHSH, teleportation and case-(iib) thresholds.
    Boundaries(BoundariesArgs),
    /// Exact and Monte-Carlo teleportation fidelity.
    TeleportSim(TeleportArgs),
    /// Numerical CHSH maximum next to the analytic value.
    ChshOpt(ChshArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, short = 'o')]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Machine parameter xi in [1/6, 1/2].
    #[arg(long)]
    pub xi: Number,
    /// Squared input amplitude alpha^2 in [0, 1].
    #[arg(long)]
    pub alpha2: Number,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Value or range lo:hi:steps.
    #[arg(long, default_value = "1/6:1/2:17")]
    pub xi: Grid,
    /// Value or range lo:hi:steps.
    #[arg(long, default_value = "0:1:11")]
    pub alpha2: Grid,
    /// Do not add the landmark xi values to the grid.
    #[arg(long)]
    pub no_landmarks: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct RegionsArgs {
    /// Points per axis.
    #[arg(long, default_value_t = 129)]
    pub resolution: usize,
    /// Do not add the landmark xi values to the grid.
    #[arg(long)]
    pub no_landmarks: bool,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct BoundariesArgs {
    /// Bisection stops when the bracket is narrower than this.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct TeleportArgs {
    #[arg(long)]
    pub xi: Grid,
    #[arg(long, default_value = "0.5")]
    pub alpha2: Grid,
    /// Haar-random inputs per point.
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[command(flatten)]
    pub out: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ChshArgs {
    #[arg(long)]
    pub xi: Grid,
    #[arg(long, default_value = "0.5")]
    pub alpha2: Grid,
    /// Optimizer tolerance (at least 1e-8).
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[command(flatten)]
    pub out: OutputArgs,
}

/// A real number, written as a decimal or as a fraction `p/q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Number(pub f64);

impl FromStr for Number {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let s = s.trim();
        let value = match s.split_once('/') {
            Some((p, q)) => {
                let p: f64 = p
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid number '{s}'"))?;
                let q: f64 = q
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid number '{s}'"))?;
                if q == 0.0 {
                    return Err(format!("zero denominator in '{s}'"));
                }
                p / q
            }
            None => s.parse().map_err(|_| format!("invalid number '{s}'"))?,
        };
        if !value.is_finite() {
            return Err(format!("'{s}' is not finite"));
        }
        Ok(Number(value))
    }
}

/// A single value or an inclusive range `lo:hi:steps`.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Value(f64),
    Range { lo: f64, hi: f64, steps: usize },
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        match *self {
            Grid::Value(v) => vec![v],
            Grid::Range { lo, hi, steps } => bhclone::sweep::linspace(lo, hi, steps),
        }
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [v] => Ok(Grid::Value(v.parse::<Number>()?.0)),
            [lo, hi, steps] => {
                let lo = lo.parse::<Number>()?.0;
                let hi = hi.parse::<Number>()?.0;
                let steps: usize = steps
                    .trim()
                    .parse()
                    .map_err(|_| format!("invalid step count in '{s}'"))?;
                if lo >= hi {
                    return Err(format!("range '{s}' needs lo < hi"));
                }
                if steps < 2 {
                    return Err(format!("range '{s}' needs at least 2 steps"));
                }
                Ok(Grid::Range { lo, hi, steps })
            }
            _ => Err(format!("expected a value or lo:hi:steps, got '{s}'")),
        }
    }
}
