//! Parameter-plane sweeps, region maps and boundary search.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{bell_report, horodecki};
use crate::error::{Error, Result};
use crate::machine::{
    build_two_clone_state, InputState, MachineParameter, XI_MAX, XI_MIN, XI_RANGE,
};
use crate::separability::{
    determinant_verdict, iib_radicand, ppt_entangled, w3_closed_form, w4_closed_form, xi_iib_onset,
    Verdict,
};
use crate::teleport::{fidelity_max, CLASSICAL_LIMIT};
use crate::tolerance;

/// Threshold of CHSH violation, `1 / (2 sqrt 2)`.
pub fn xi_chsh() -> f64 {
    1.0 / (2.0 * std::f64::consts::SQRT_2)
}

/// Threshold of teleportation usefulness.
pub const XI_TELEPORT: f64 = 0.25;

/// Special machine parameters: both ends of the range, the case-(iib)
/// onset, the usefulness threshold and the CHSH threshold, ascending.
pub fn landmarks() -> [f64; 5] {
    [XI_MIN, xi_iib_onset(), XI_TELEPORT, xi_chsh(), XI_MAX]
}

/// `n` evenly spaced points from `lo` to `hi` inclusive, with exact endpoints.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

/// Adds the [`landmarks`] lying inside the span of `grid`, sorted. Grid
/// points within `1e-12` of a landmark are replaced by the landmark.
pub fn with_landmarks(grid: &[f64]) -> Vec<f64> {
    let Some(lo) = grid.iter().copied().reduce(f64::min) else {
        return Vec::new();
    };
    let hi = grid.iter().copied().fold(lo, f64::max);
    let marks: Vec<f64> = landmarks()
        .into_iter()
        .filter(|&l| (lo - 1e-12..=hi + 1e-12).contains(&l))
        .collect();
    let mut out: Vec<f64> = grid
        .iter()
        .map(|&x| {
            marks
                .iter()
                .copied()
                .find(|&l| (x - l).abs() < 1e-12)
                .unwrap_or(x)
        })
        .chain(marks.iter().copied())
        .collect();
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

/// Every quantity computed for one point of the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub xi: f64,
    pub alpha2: f64,
    pub w3: f64,
    pub w4: f64,
    pub min_pt_eig: f64,
    pub entangled: bool,
    pub m_value: f64,
    pub chsh_max: f64,
    pub violates_chsh: bool,
    pub n_value: f64,
    pub f_max: f64,
    pub useful: bool,
}

impl SweepRow {
    pub const HEADER: [&'static str; 12] = [
        "xi",
        "alpha2",
        "w3",
        "w4",
        "min_pt_eig",
        "entangled",
        "m_value",
        "chsh_max",
        "violates_chsh",
        "n_value",
        "f_max",
        "useful",
    ];
}

pub fn analyze_point(m: MachineParameter, input: InputState) -> Result<SweepRow> {
    let rho = build_two_clone_state(m, input);
    let sep = ppt_entangled(&rho);
    let bell = bell_report(&rho)?;
    let tele = fidelity_max(&rho);
    Ok(SweepRow {
        xi: m.xi(),
        alpha2: input.alpha2(),
        w3: sep.w3,
        w4: sep.w4,
        min_pt_eig: sep.min_pt_eigenvalue,
        entangled: sep.entangled,
        m_value: bell.m_value,
        chsh_max: bell.chsh_max_numeric,
        violates_chsh: bell.violates,
        n_value: tele.n_value,
        f_max: tele.f_max,
        useful: tele.useful,
    })
}

pub(crate) fn validate_grids(
    xi_grid: &[f64],
    alpha2_grid: &[f64],
) -> Result<(Vec<MachineParameter>, Vec<InputState>)> {
    let bad_xi: Vec<f64> = xi_grid
        .iter()
        .copied()
        .filter(|&x| MachineParameter::new(x).is_err())
        .collect();
    if !bad_xi.is_empty() {
        return Err(Error::OutOfRangeValues {
            name: "xi",
            range: XI_RANGE.to_string(),
            offenders: bad_xi,
        });
    }
    let bad_alpha: Vec<f64> = alpha2_grid
        .iter()
        .copied()
        .filter(|&a| InputState::from_alpha2(a).is_err())
        .collect();
    if !bad_alpha.is_empty() {
        return Err(Error::OutOfRangeValues {
            name: "alpha2",
            range: "[0, 1]".to_string(),
            offenders: bad_alpha,
        });
    }
    let machines = xi_grid
        .iter()
        .map(|&x| MachineParameter::new(x))
        .collect::<Result<_>>()?;
    let inputs = alpha2_grid
        .iter()
        .map(|&a| InputState::from_alpha2(a))
        .collect::<Result<_>>()?;
    Ok((machines, inputs))
}

/// One row per grid point, `xi`-major.
pub fn sweep(xi_grid: &[f64], alpha2_grid: &[f64]) -> Result<Vec<SweepRow>> {
    let (machines, inputs) = validate_grids(xi_grid, alpha2_grid)?;
    let points: Vec<(MachineParameter, InputState)> = machines
        .iter()
        .flat_map(|&m| inputs.iter().map(move |&s| (m, s)))
        .collect();
    points
        .par_iter()
        .map(|&(m, s)| analyze_point(m, s))
        .collect()
}

/// Boolean criteria whose switching point in `xi` is searched by bisection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCriterion {
    /// `M(rho) > 1` from the correlation-matrix eigenvalues.
    ChshViolation,
    /// `F_max > 2/3` from the correlation-matrix singular values.
    TeleportUseful,
    /// The case-(iib) radicand `A^2 - 8 A xi^4` is positive, i.e. the
    /// determinant-positive band in `alpha^2` exists.
    Case2bExists,
}

impl BoundaryCriterion {
    pub const ALL: [BoundaryCriterion; 3] = [
        BoundaryCriterion::ChshViolation,
        BoundaryCriterion::TeleportUseful,
        BoundaryCriterion::Case2bExists,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryCriterion::ChshViolation => "chsh-violation",
            BoundaryCriterion::TeleportUseful => "teleport-useful",
            BoundaryCriterion::Case2bExists => "case-iib-nonempty",
        }
    }

    pub fn target(self) -> f64 {
        match self {
            BoundaryCriterion::ChshViolation => xi_chsh(),
            BoundaryCriterion::TeleportUseful => XI_TELEPORT,
            BoundaryCriterion::Case2bExists => xi_iib_onset(),
        }
    }

    /// Accuracy the located boundary must reach.
    pub fn accuracy(self) -> f64 {
        match self {
            BoundaryCriterion::ChshViolation | BoundaryCriterion::TeleportUseful => 1e-9,
            BoundaryCriterion::Case2bExists => 1e-6,
        }
    }

    /// Search interval with a sign change of the predicate.
    pub fn default_bracket(self) -> (f64, f64) {
        match self {
            BoundaryCriterion::ChshViolation => (0.3, 0.4),
            BoundaryCriterion::TeleportUseful => (0.2, 0.3),
            BoundaryCriterion::Case2bExists => (0.17, 0.21),
        }
    }

    pub fn holds(self, xi: f64) -> Result<bool> {
        let m = MachineParameter::new(xi)?;
        let probe = InputState::from_alpha2(0.5)?;
        Ok(match self {
            BoundaryCriterion::ChshViolation => {
                horodecki(&build_two_clone_state(m, probe)).violates
            }
            BoundaryCriterion::TeleportUseful => {
                fidelity_max(&build_two_clone_state(m, probe)).useful
            }
            BoundaryCriterion::Case2bExists => iib_radicand(m.xi()) > 0.0,
        })
    }
}

impl fmt::Display for BoundaryCriterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryResult {
    pub name: &'static str,
    pub xi_star: f64,
    pub target: f64,
    pub residual: f64,
    pub accuracy: f64,
    pub passed: bool,
}

/// Bisects `criterion` on `[lo, hi]` until the bracket is narrower than `tol`.
pub fn locate_boundary(
    criterion: BoundaryCriterion,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<BoundaryResult> {
    if tol.is_nan() || tol < tolerance::BISECTION_MIN_TOL {
        return Err(Error::InvalidArgument(format!(
            "bisection tolerance must be at least {:e}, got {tol}",
            tolerance::BISECTION_MIN_TOL
        )));
    }
    if lo.is_nan() || hi.is_nan() || lo >= hi {
        return Err(Error::InvalidArgument(format!(
            "empty bracket [{lo}, {hi}]"
        )));
    }
    let at_lo = criterion.holds(lo)?;
    if at_lo == criterion.holds(hi)? {
        return Err(Error::NoSignChange {
            name: criterion.name(),
            lo,
            hi,
            value: at_lo,
        });
    }
    let (mut lo, mut hi) = (lo, hi);
    while hi - lo >= tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if criterion.holds(mid)? == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xi_star = 0.5 * (lo + hi);
    let target = criterion.target();
    let residual = (xi_star - target).abs();
    Ok(BoundaryResult {
        name: criterion.name(),
        xi_star,
        target,
        residual,
        accuracy: criterion.accuracy(),
        passed: residual < criterion.accuracy(),
    })
}

/// Located boundaries of all three criteria on their default brackets.
pub fn all_boundaries(tol: f64) -> Result<Vec<BoundaryResult>> {
    BoundaryCriterion::ALL
        .iter()
        .map(|&c| {
            let (lo, hi) = c.default_bracket();
            locate_boundary(c, lo, hi, tol)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EntanglementClass {
    SeparableOrIndeterminate,
    EntangledNoChsh,
    EntangledChshViolating,
}

impl EntanglementClass {
    fn from_flags(entangled: bool, violates: bool) -> Self {
        match (entangled, violates) {
            (false, _) => EntanglementClass::SeparableOrIndeterminate,
            (true, false) => EntanglementClass::EntangledNoChsh,
            (true, true) => EntanglementClass::EntangledChshViolating,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            EntanglementClass::SeparableOrIndeterminate => "separable-or-indeterminate",
            EntanglementClass::EntangledNoChsh => "entangled-no-chsh",
            EntanglementClass::EntangledChshViolating => "entangled-chsh-violating",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct RegionLabel {
    pub class: EntanglementClass,
    pub useful: bool,
}

impl fmt::Display for RegionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let use_label = if self.useful { "useful" } else { "not-useful" };
        write!(f, "{}/{}", self.class.name(), use_label)
    }
}

/// One classified cell with the statistics behind both labels.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionCell {
    pub xi: f64,
    pub alpha2: f64,
    /// Partial-transpose eigenvalue, correlation-matrix eigenvalues.
    pub oracle: RegionLabel,
    /// Closed forms: `W3`, `W4`, `M = 8 xi^2`, `F_max` piecewise in `xi`.
    pub closed_form: RegionLabel,
    pub min_pt_eig: f64,
    pub w3: f64,
    pub w4: f64,
    pub m_value: f64,
    pub m_closed_form: f64,
    pub f_max: f64,
    pub f_max_closed_form: f64,
    /// Labels differ.
    pub differs: bool,
    /// Labels differ on a component whose statistics are all clear of the
    /// boundary band.
    pub genuine_disagreement: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionMap {
    pub xi_values: Vec<f64>,
    pub alpha2_values: Vec<f64>,
    pub cells: Vec<RegionCell>,
    pub diff_count: usize,
    pub genuine_diff_count: usize,
}

/// Closed-form `F_max`: 2/3 up to `xi = 1/4`, `(1 + 4 xi)/3` above.
pub fn f_max_closed_form(xi: f64) -> f64 {
    if xi <= XI_TELEPORT {
        CLASSICAL_LIMIT
    } else {
        (1.0 + 4.0 * xi) / 3.0
    }
}

fn classify_cell(m: MachineParameter, input: InputState) -> RegionCell {
    let band = tolerance::BOUNDARY_BAND;
    let rho = build_two_clone_state(m, input);
    let sep = ppt_entangled(&rho);
    let h = horodecki(&rho);
    let tele = fidelity_max(&rho);

    let w3 = w3_closed_form(m, input);
    let w4 = w4_closed_form(m, input);
    let xi = m.xi();
    let m_closed = 8.0 * xi * xi;
    let f_closed = f_max_closed_form(xi);

    let ent_closed = determinant_verdict(w3, w4) == Verdict::Entangled;
    let viol_closed = m_closed > 1.0 + tolerance::SIGN;
    let useful_closed = f_closed > CLASSICAL_LIMIT + tolerance::USEFULNESS;

    let oracle = RegionLabel {
        class: EntanglementClass::from_flags(sep.entangled, h.violates),
        useful: tele.useful,
    };
    let closed_form = RegionLabel {
        class: EntanglementClass::from_flags(ent_closed, viol_closed),
        useful: useful_closed,
    };

    let clear = |a: f64, b: f64| a.abs() >= band && b.abs() >= band;
    let genuine = (sep.entangled != ent_closed && clear(sep.min_pt_eigenvalue, w3.min(w4)))
        || (h.violates != viol_closed && clear(h.m_value - 1.0, m_closed - 1.0))
        || (tele.useful != useful_closed
            && clear(tele.f_max - CLASSICAL_LIMIT, f_closed - CLASSICAL_LIMIT));

    RegionCell {
        xi,
        alpha2: input.alpha2(),
        oracle,
        closed_form,
        min_pt_eig: sep.min_pt_eigenvalue,
        w3,
        w4,
        m_value: h.m_value,
        m_closed_form: m_closed,
        f_max: tele.f_max,
        f_max_closed_form: f_closed,
        differs: oracle != closed_form,
        genuine_disagreement: genuine,
    }
}

/// Classifies every cell of `xi_grid x alpha2_grid`, `xi`-major.
pub fn region_map_on(xi_grid: &[f64], alpha2_grid: &[f64]) -> Result<RegionMap> {
    let (machines, inputs) = validate_grids(xi_grid, alpha2_grid)?;
    let points: Vec<(MachineParameter, InputState)> = machines
        .iter()
        .flat_map(|&m| inputs.iter().map(move |&s| (m, s)))
        .collect();
    let cells: Vec<RegionCell> = points
        .par_iter()
        .map(|&(m, s)| classify_cell(m, s))
        .collect();
    let diff_count = cells.iter().filter(|c| c.differs).count();
    let genuine_diff_count = cells.iter().filter(|c| c.genuine_disagreement).count();
    Ok(RegionMap {
        xi_values: xi_grid.to_vec(),
        alpha2_values: alpha2_grid.to_vec(),
        cells,
        diff_count,
        genuine_diff_count,
    })
}

/// Region map on `resolution` points per axis, with the landmark `xi`
/// values added.
pub fn region_map(resolution: usize) -> Result<RegionMap> {
    if resolution < 2 {
        return Err(Error::InvalidArgument(format!(
            "resolution must be at least 2, got {resolution}"
        )));
    }
    let xi_grid = with_landmarks(&linspace(XI_MIN, XI_MAX, resolution));
    let alpha2_grid = linspace(0.0, 1.0, resolution);
    region_map_on(&xi_grid, &alpha2_grid)
}
