//! Command-line front end for the `bhclone` library.
//!
//! [`run`] executes a parsed [`Cli`] and returns the rendered report; the
//! binary only handles argument errors, the output destination and the exit
//! status.

pub mod args;
pub mod format;

use std::fs;
use std::io::Write as _;
use std::path::Path;

use bhclone::bell::{chsh_max_numeric, horodecki};
use bhclone::machine::{build_two_clone_state, validate_machine, InputState, XI_MAX, XI_MIN};
use bhclone::sweep::{
    all_boundaries, analyze_point, linspace, region_map_on, sweep, with_landmarks, BoundaryResult,
    RegionMap, SweepRow,
};
use bhclone::teleport::{fidelity_max, simulate_protocol_exact, simulate_protocol_mc};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use args::{AnalyzeArgs, BoundariesArgs, ChshArgs, RegionsArgs, SweepArgs, TeleportArgs};
pub use args::{Cli, Command, Format};
use format::{fmt_g, round_json};

/// Environment variable overriding the worker thread count.
pub const THREADS_ENV: &str = "BHCLONE_THREADS";

pub type CliResult<T> = std::result::Result<T, String>;

/// A rendered report and where it goes.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub text: String,
    pub output: Option<std::path::PathBuf>,
}

impl Report {
    /// Writes to the output file, or to standard output when none was given.
    pub fn emit(&self) -> CliResult<()> {
        match &self.output {
            Some(path) => write_file(path, &self.text),
            None => {
                let mut out = std::io::stdout().lock();
                out.write_all(self.text.as_bytes())
                    .and_then(|_| out.flush())
                    .map_err(|e| format!("cannot write to standard output: {e}"))
            }
        }
    }
}

fn write_file(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| format!("cannot write to {}: {e}", path.display()))
}

/// Configures the global thread pool from [`THREADS_ENV`], if set.
pub fn configure_threads() -> CliResult<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("{THREADS_ENV} must be a positive integer, got '{value}'"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| format!("cannot configure {n} threads: {e}"))
}

/// Executes one command and renders its report.
pub fn run(cli: &Cli) -> CliResult<Report> {
    let (text, output) = match &cli.command {
        Command::Analyze(a) => (analyze(a)?, &a.out.output),
        Command::Sweep(a) => (run_sweep(a)?, &a.out.output),
        Command::Regions(a) => (regions(a)?, &a.out.output),
        Command::Boundaries(a) => (boundaries(a)?, &a.out.output),
        Command::TeleportSim(a) => (teleport_sim(a)?, &a.out.output),
        Command::ChshOpt(a) => (chsh_opt(a)?, &a.out.output),
    };
    Ok(Report {
        text,
        output: output.clone(),
    })
}

fn err(e: bhclone::Error) -> String {
    e.to_string()
}

fn to_json<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("serializable report")
}

fn render_json(mut v: Value) -> String {
    round_json(&mut v);
    let mut s = serde_json::to_string_pretty(&v).expect("json");
    s.push('\n');
    s
}

/// The fields of `body` plus a `command` tag.
fn tagged(command: &str, body: Value) -> Value {
    let mut map = serde_json::Map::new();
    map.insert("command".into(), json!(command));
    if let Value::Object(fields) = body {
        map.extend(fields);
    }
    Value::Object(map)
}

/// CSV table with a header record.
fn csv_table<R>(header: &[&str], rows: R) -> String
where
    R: IntoIterator<Item = Vec<String>>,
{
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields")
}

fn row_fields(r: &SweepRow) -> Vec<String> {
    vec![
        fmt_g(r.xi),
        fmt_g(r.alpha2),
        fmt_g(r.w3),
        fmt_g(r.w4),
        fmt_g(r.min_pt_eig),
        r.entangled.to_string(),
        fmt_g(r.m_value),
        fmt_g(r.chsh_max),
        r.violates_chsh.to_string(),
        fmt_g(r.n_value),
        fmt_g(r.f_max),
        r.useful.to_string(),
    ]
}

fn rows_csv(rows: &[SweepRow]) -> String {
    csv_table(&SweepRow::HEADER, rows.iter().map(row_fields))
}

fn analyze(a: &AnalyzeArgs) -> CliResult<String> {
    let m = validate_machine(a.xi.0).map_err(err)?;
    let s = InputState::from_alpha2(a.alpha2.0).map_err(err)?;
    let row = analyze_point(m, s).map_err(err)?;
    Ok(match a.out.format {
        Format::Csv => rows_csv(&[row]),
        Format::Json => render_json(tagged("analyze", to_json(&row))),
    })
}

fn xi_grid(values: Vec<f64>, landmarks: bool) -> Vec<f64> {
    if landmarks {
        with_landmarks(&values)
    } else {
        values
    }
}

fn run_sweep(a: &SweepArgs) -> CliResult<String> {
    let xs = xi_grid(a.xi.values(), !a.no_landmarks);
    let rows = sweep(&xs, &a.alpha2.values()).map_err(err)?;
    Ok(match a.out.format {
        Format::Csv => rows_csv(&rows),
        Format::Json => render_json(tagged("sweep", json!({ "rows": to_json(&rows) }))),
    })
}

const REGION_HEADER: [&str; 15] = [
    "xi",
    "alpha2",
    "oracle_label",
    "closed_form_label",
    "min_pt_eig",
    "w3",
    "w4",
    "m_value",
    "m_closed_form",
    "f_max",
    "f_max_closed_form",
    "oracle_useful",
    "closed_form_useful",
    "differs",
    "genuine_disagreement",
];

fn regions(a: &RegionsArgs) -> CliResult<String> {
    if a.resolution < 2 {
        return Err(format!(
            "resolution must be at least 2, got {}",
            a.resolution
        ));
    }
    let xs = xi_grid(linspace(XI_MIN, XI_MAX, a.resolution), !a.no_landmarks);
    let map = region_map_on(&xs, &linspace(0.0, 1.0, a.resolution)).map_err(err)?;
    Ok(match a.out.format {
        Format::Csv => regions_csv(&map, a.resolution),
        Format::Json => {
            let mut body = to_json(&map);
            if let Value::Object(fields) = &mut body {
                fields.insert("resolution".into(), json!(a.resolution));
                for cell in fields["cells"].as_array_mut().into_iter().flatten() {
                    label_strings(cell);
                }
            }
            render_json(tagged("regions", body))
        }
    })
}

/// Adds the combined `class/usefulness` label string next to each label.
fn label_strings(cell: &mut Value) {
    for key in ["oracle", "closed_form"] {
        if let Some(label) = cell.get_mut(key).and_then(Value::as_object_mut) {
            let class = label["class"].as_str().unwrap_or_default().to_string();
            let useful = label["useful"].as_bool().unwrap_or_default();
            let text = format!("{class}/{}", if useful { "useful" } else { "not-useful" });
            label.insert("label".into(), json!(text));
        }
    }
}

fn regions_csv(map: &RegionMap, resolution: usize) -> String {
    let mut out = format!(
        "# resolution={resolution} cells={} diff_count={} genuine_diff_count={}\n",
        map.cells.len(),
        map.diff_count,
        map.genuine_diff_count
    );
    out.push_str(&csv_table(
        &REGION_HEADER,
        map.cells.iter().map(|c| {
            vec![
                fmt_g(c.xi),
                fmt_g(c.alpha2),
                c.oracle.class.name().to_string(),
                c.closed_form.class.name().to_string(),
                fmt_g(c.min_pt_eig),
                fmt_g(c.w3),
                fmt_g(c.w4),
                fmt_g(c.m_value),
                fmt_g(c.m_closed_form),
                fmt_g(c.f_max),
                fmt_g(c.f_max_closed_form),
                c.oracle.useful.to_string(),
                c.closed_form.useful.to_string(),
                c.differs.to_string(),
                c.genuine_disagreement.to_string(),
            ]
        }),
    ));
    out
}

fn boundaries(a: &BoundariesArgs) -> CliResult<String> {
    let results: Vec<BoundaryResult> = all_boundaries(a.tol).map_err(err)?;
    Ok(match a.out.format {
        Format::Csv => csv_table(
            &[
                "name", "xi_star", "target", "residual", "accuracy", "passed",
            ],
            results.iter().map(|b| {
                vec![
                    b.name.to_string(),
                    fmt_g(b.xi_star),
                    fmt_g(b.target),
                    fmt_g(b.residual),
                    fmt_g(b.accuracy),
                    b.passed.to_string(),
                ]
            }),
        ),
        Format::Json => render_json(tagged(
            "boundaries",
            json!({ "tol": a.tol, "boundaries": to_json(&results) }),
        )),
    })
}

/// Validated `(xi, alpha2)` pairs, `xi`-major.
fn points(xi: &args::Grid, alpha2: &args::Grid) -> CliResult<Vec<(f64, f64)>> {
    let xs = xi.values();
    let ys = alpha2.values();
    for &x in &xs {
        validate_machine(x).map_err(err)?;
    }
    for &y in &ys {
        InputState::from_alpha2(y).map_err(err)?;
    }
    Ok(xs
        .iter()
        .flat_map(|&x| ys.iter().map(move |&y| (x, y)))
        .collect())
}

fn state(xi: f64, alpha2: f64) -> CliResult<bhclone::TwoQubitState> {
    let m = validate_machine(xi).map_err(err)?;
    let s = InputState::from_alpha2(alpha2).map_err(err)?;
    Ok(build_two_clone_state(m, s))
}

#[derive(Debug, Clone, Serialize)]
struct TeleportRow {
    xi: f64,
    alpha2: f64,
    n_value: f64,
    f_max: f64,
    useful: bool,
    f_exact: f64,
    f_mc: f64,
    std_error: f64,
    samples: usize,
    correction_table: String,
}

fn teleport_sim(a: &TeleportArgs) -> CliResult<String> {
    if a.samples == 0 {
        return Err("samples must be at least 1".into());
    }
    let rows = points(&a.xi, &a.alpha2)?
        .into_iter()
        .map(|(xi, alpha2)| {
            let rho = state(xi, alpha2)?;
            let fm = fidelity_max(&rho);
            let exact = simulate_protocol_exact(&rho);
            let mc = simulate_protocol_mc(&rho, a.samples, a.seed).map_err(err)?;
            Ok(TeleportRow {
                xi,
                alpha2,
                n_value: fm.n_value,
                f_max: fm.f_max,
                useful: fm.useful,
                f_exact: exact.f_protocol,
                f_mc: mc.mean,
                std_error: mc.std_error,
                samples: mc.samples,
                correction_table: exact.correction_table.to_string(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(match a.out.format {
        Format::Csv => csv_table(
            &[
                "xi",
                "alpha2",
                "n_value",
                "f_max",
                "useful",
                "f_exact",
                "f_mc",
                "std_error",
                "samples",
                "correction_table",
                "seed",
            ],
            rows.iter().map(|r| {
                vec![
                    fmt_g(r.xi),
                    fmt_g(r.alpha2),
                    fmt_g(r.n_value),
                    fmt_g(r.f_max),
                    r.useful.to_string(),
                    fmt_g(r.f_exact),
                    fmt_g(r.f_mc),
                    fmt_g(r.std_error),
                    r.samples.to_string(),
                    r.correction_table.clone(),
                    a.seed.to_string(),
                ]
            }),
        ),
        Format::Json => render_json(tagged(
            "teleport-sim",
            json!({ "seed": a.seed, "samples": a.samples, "rows": to_json(&rows) }),
        )),
    })
}

#[derive(Debug, Clone, Serialize)]
struct ChshRow {
    xi: f64,
    alpha2: f64,
    chsh_numeric: f64,
    chsh_analytic: f64,
    difference: f64,
    m_value: f64,
    violates_chsh: bool,
    iterations: usize,
}

fn chsh_opt(a: &ChshArgs) -> CliResult<String> {
    let rows = points(&a.xi, &a.alpha2)?
        .par_iter()
        .map(|&(xi, alpha2)| {
            let rho = state(xi, alpha2)?;
            let h = horodecki(&rho);
            let opt = chsh_max_numeric(&rho, a.tol).map_err(err)?;
            Ok(ChshRow {
                xi,
                alpha2,
                chsh_numeric: opt.value,
                chsh_analytic: h.chsh_analytic(),
                difference: opt.value - h.chsh_analytic(),
                m_value: h.m_value,
                violates_chsh: h.violates,
                iterations: opt.iterations,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(match a.out.format {
        Format::Csv => csv_table(
            &[
                "xi",
                "alpha2",
                "chsh_numeric",
                "chsh_analytic",
                "difference",
                "m_value",
                "violates_chsh",
                "iterations",
            ],
            rows.iter().map(|r| {
                vec![
                    fmt_g(r.xi),
                    fmt_g(r.alpha2),
                    fmt_g(r.chsh_numeric),
                    fmt_g(r.chsh_analytic),
                    fmt_g(r.difference),
                    fmt_g(r.m_value),
                    r.violates_chsh.to_string(),
                    r.iterations.to_string(),
                ]
            }),
        ),
        Format::Json => render_json(tagged(
            "chsh-opt",
            json!({ "tol": a.tol, "rows": to_json(&rows) }),
        )),
    })
}

/// First line of a message, for single-line diagnostics.
pub fn first_line(message: &str) -> &str {
    message.lines().next().unwrap_or_default().trim_end()
}
