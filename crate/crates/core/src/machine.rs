//! Machine parameter, input state and the two-clone output state.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{fidelity_with_pure, ComplexMatrix, TwoQubitState};

/// Lower end of the admissible machine overlap.
pub const XI_MIN: f64 = 1.0 / 6.0;
/// Upper end of the admissible machine overlap.
pub const XI_MAX: f64 = 0.5;

pub(crate) const XI_RANGE: &str = "[1/6, 1/2]";

/// Machine overlap `xi = <Y_i|Y_i>`; `eta = 1 - 2 xi` is always derived.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct MachineParameter {
    xi: f64,
}

impl MachineParameter {
    /// Accepts `xi` in the closed interval `[1/6, 1/2]`.
    pub fn new(xi: f64) -> Result<Self> {
        if !xi.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "xi must be finite, got {xi}"
            )));
        }
        if !(XI_MIN..=XI_MAX).contains(&xi) {
            return Err(Error::OutOfRange {
                name: "xi",
                value: xi,
                range: XI_RANGE.to_string(),
            });
        }
        Ok(Self { xi })
    }

    pub fn xi(self) -> f64 {
        self.xi
    }

    pub fn eta(self) -> f64 {
        1.0 - 2.0 * self.xi
    }
}

/// Shorthand for [`MachineParameter::new`].
pub fn validate_machine(xi: f64) -> Result<MachineParameter> {
    MachineParameter::new(xi)
}

/// Real-amplitude qubit `alpha|0> + beta|1>` with `alpha, beta >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputState {
    alpha: f64,
    beta: f64,
}

impl InputState {
    pub fn from_alpha(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() || !(0.0..=1.0).contains(&alpha) {
            return Err(Error::OutOfRange {
                name: "alpha",
                value: alpha,
                range: "[0, 1]".to_string(),
            });
        }
        Ok(Self {
            alpha,
            beta: (1.0 - alpha * alpha).max(0.0).sqrt(),
        })
    }

    pub fn from_alpha2(alpha2: f64) -> Result<Self> {
        if !alpha2.is_finite() || !(0.0..=1.0).contains(&alpha2) {
            return Err(Error::OutOfRange {
                name: "alpha2",
                value: alpha2,
                range: "[0, 1]".to_string(),
            });
        }
        Ok(Self {
            alpha: alpha2.sqrt(),
            beta: (1.0 - alpha2).sqrt(),
        })
    }

    pub fn alpha(self) -> f64 {
        self.alpha
    }

    pub fn beta(self) -> f64 {
        self.beta
    }

    pub fn alpha2(self) -> f64 {
        self.alpha * self.alpha
    }

    pub fn beta2(self) -> f64 {
        self.beta * self.beta
    }

    pub fn amplitudes(self) -> [Complex64; 2] {
        [
            Complex64::new(self.alpha, 0.0),
            Complex64::new(self.beta, 0.0),
        ]
    }
}

/// Reduced density matrix of the two clones.
///
/// Nonzero entries: `rho[00,00] = alpha^2 eta`, `rho[11,11] = beta^2 eta`,
/// `xi` on the whole `{01, 10}` block, and `alpha beta eta / 2` coupling
/// that block to `|00>` and `|11>`. `rho[00,11]` vanishes.
pub fn build_two_clone_state(m: MachineParameter, input: InputState) -> TwoQubitState {
    let xi = m.xi();
    let eta = m.eta();
    let (a, b) = (input.alpha(), input.beta());
    let edge = a * b * eta / 2.0;
    let rows = [
        [a * a * eta, edge, edge, 0.0],
        [edge, xi, xi, edge],
        [edge, xi, xi, edge],
        [0.0, edge, edge, b * b * eta],
    ];
    let matrix = ComplexMatrix::from_real_rows(&rows).expect("4x4 rows");
    TwoQubitState::new(matrix).expect("two-clone state is a valid density matrix")
}

/// Fidelity of one clone with the input, `<chi| rho_a |chi>`.
pub fn clone_fidelity(m: MachineParameter, input: InputState) -> f64 {
    let rho = build_two_clone_state(m, input);
    let chi = input.amplitudes();
    let norm = (chi[0].norm_sqr() + chi[1].norm_sqr()).sqrt();
    let chi = chi.map(|z| z / norm);
    fidelity_with_pure(&chi, &rho.partial_trace_b()).expect("normalized input")
}
