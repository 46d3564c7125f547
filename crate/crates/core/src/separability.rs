//! Inseparability of the two-clone state.
//!
//! Two independent routes are provided: the closed-form determinants `W3`
//! (leading 3x3 minor of the partial transpose) and `W4` (full determinant of
//! the partial transpose), and the minimum eigenvalue of the partial
//! transpose. For two qubits the eigenvalue sign is the exact criterion, so it
//! is the ground truth the determinant route is checked against.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{determinant, hermitian_eigenvalues, TwoQubitState};
use crate::machine::{InputState, MachineParameter};
use crate::tolerance;

/// `xi` below which the case-(iib) radicand is negative: `(3 - sqrt 5) / 4`.
pub fn xi_iib_onset() -> f64 {
    (3.0 - 5.0_f64.sqrt()) / 4.0
}

/// Sign classification of a statistic relative to [`tolerance::SIGN`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Entangled,
    Separable,
    /// Within the sign tolerance of zero.
    Boundary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeparabilityReport {
    pub w3: f64,
    pub w4: f64,
    pub min_pt_eigenvalue: f64,
    pub entangled: bool,
    pub verdict: Verdict,
}

impl SeparabilityReport {
    /// Verdict of the determinant route: entangled if either determinant is
    /// negative beyond the tolerance.
    pub fn determinant_verdict(&self) -> Verdict {
        determinant_verdict(self.w3, self.w4)
    }

    /// `min(W3, W4)`, the statistic whose sign the determinant route uses.
    pub fn determinant_statistic(&self) -> f64 {
        self.w3.min(self.w4)
    }
}

pub(crate) fn determinant_verdict(w3: f64, w4: f64) -> Verdict {
    let stat = w3.min(w4);
    if stat < -tolerance::SIGN {
        Verdict::Entangled
    } else if stat > tolerance::SIGN {
        Verdict::Separable
    } else {
        Verdict::Boundary
    }
}

pub fn w3_closed_form(m: MachineParameter, input: InputState) -> f64 {
    let (xi, eta) = (m.xi(), m.eta());
    input.alpha2() * xi * eta / 2.0 * (2.0 * xi - input.beta2() * eta)
}

pub fn w4_closed_form(m: MachineParameter, input: InputState) -> f64 {
    let (xi, eta) = (m.xi(), m.eta());
    0.5 * (input.alpha2() * input.beta2() * xi * eta * eta * (6.0 * xi - 1.0) - 2.0 * xi.powi(4))
}

/// `(W3, W4)` as determinants of the partially transposed matrix.
pub fn w3_w4_from_matrix(rho: &TwoQubitState) -> (f64, f64) {
    let pt = rho.partial_transpose_b();
    let minor = pt.leading_minor(3).expect("3 <= 4");
    (determinant(&minor).re, determinant(&pt).re)
}

/// Partial-transpose test with the eigenvalue oracle as the verdict.
pub fn ppt_entangled(rho: &TwoQubitState) -> SeparabilityReport {
    let (w3, w4) = w3_w4_from_matrix(rho);
    let pt = rho.partial_transpose_b();
    let min_pt_eigenvalue = hermitian_eigenvalues(&pt).expect("partial transpose is Hermitian")[0];
    let verdict = if min_pt_eigenvalue < -tolerance::SIGN {
        Verdict::Entangled
    } else if min_pt_eigenvalue > tolerance::SIGN {
        Verdict::Separable
    } else {
        Verdict::Boundary
    };
    SeparabilityReport {
        w3,
        w4,
        min_pt_eigenvalue,
        entangled: verdict == Verdict::Entangled,
        verdict,
    }
}

/// Upper `alpha^2` bound of case (iia), `(1 - 4 xi) / (1 - 2 xi)`, defined for
/// `1/6 < xi < 1/4`. Below it `W3 < 0`.
pub fn case_iia_bound(m: MachineParameter) -> Result<f64> {
    let xi = m.xi();
    if !(xi > 1.0 / 6.0 && xi < 0.25) {
        return Err(Error::OutOfRange {
            name: "xi",
            value: xi,
            range: "(1/6, 1/4)".to_string(),
        });
    }
    Ok(iia_bound_unchecked(xi))
}

fn iia_bound_unchecked(xi: f64) -> f64 {
    (1.0 - 4.0 * xi) / (1.0 - 2.0 * xi)
}

/// `A = xi (6 xi - 1) (1 - 2 xi)^2`.
pub fn iib_coefficient(xi: f64) -> f64 {
    xi * (6.0 * xi - 1.0) * (1.0 - 2.0 * xi).powi(2)
}

/// `A^2 - 8 A xi^4`. Positive exactly when some `alpha^2` makes `W4 > 0`.
pub fn iib_radicand(xi: f64) -> f64 {
    let a = iib_coefficient(xi);
    a * a - 8.0 * a * xi.powi(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IibStatus {
    Nonempty,
    /// Bounds coincide or cross.
    Empty,
    /// Negative radicand, so the upper bound does not exist.
    Undefined,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionBounds {
    pub lower_alpha2: f64,
    pub upper_alpha2: Option<f64>,
    pub nonempty: bool,
    pub status: IibStatus,
}

/// Case (iib) interval `(1-4xi)/(1-2xi) < alpha^2 < 1/2 - sqrt(A^2 - 8 A xi^4) / (2A)`
/// on which `W3 > 0` and `W4 < 0`, for `(3 - sqrt 5)/4 < xi < 1/4`.
pub fn case_iib_bounds(m: MachineParameter) -> Result<RegionBounds> {
    let xi = m.xi();
    if !(xi > xi_iib_onset() && xi < 0.25) {
        return Err(Error::OutOfRange {
            name: "xi",
            value: xi,
            range: "((3 - sqrt 5)/4, 1/4)".to_string(),
        });
    }
    let lower = iia_bound_unchecked(xi);
    let radicand = iib_radicand(xi);
    if radicand < 0.0 {
        return Ok(RegionBounds {
            lower_alpha2: lower,
            upper_alpha2: None,
            nonempty: false,
            status: IibStatus::Undefined,
        });
    }
    let a = iib_coefficient(xi);
    let upper = 0.5 - radicand.sqrt() / (2.0 * a);
    let nonempty = upper - lower > tolerance::DEGENERACY;
    Ok(RegionBounds {
        lower_alpha2: lower,
        upper_alpha2: Some(upper),
        nonempty,
        status: if nonempty {
            IibStatus::Nonempty
        } else {
            IibStatus::Empty
        },
    })
}
