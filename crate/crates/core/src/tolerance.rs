//! Numerical tolerances shared by every module and by the acceptance suite.

/// Maximum |a_ij - conj(a_ji)| accepted for a Hermitian matrix.
pub const HERMITICITY: f64 = 1e-12;

/// Looser Hermiticity check applied before eigen-decomposition.
pub const EIG_INPUT_HERMITICITY: f64 = 1e-10;

/// Maximum |trace - 1| accepted for a density matrix.
pub const TRACE: f64 = 1e-12;

/// Smallest eigenvalue accepted for a positive semidefinite matrix.
pub const PSD_SLACK: f64 = -1e-10;

/// Off-diagonal Frobenius mass at which Jacobi sweeps stop (relative to the
/// Frobenius norm once it exceeds one).
pub const EIG_CONVERGENCE: f64 = 1e-14;

/// Maximum number of cyclic Jacobi sweeps.
pub const EIG_MAX_SWEEPS: usize = 100;

/// Maximum |<psi|psi> - 1| accepted for a pure state vector.
pub const NORMALIZATION: f64 = 1e-12;

/// A statistic counts as negative (or positive) only beyond this magnitude.
pub const SIGN: f64 = 1e-10;

/// Width of the band around zero inside which the determinant test and the
/// eigenvalue oracle are not required to agree.
pub const BOUNDARY_BAND: f64 = 1e-8;

/// Margin for the teleportation usefulness test `f_max > 2/3`.
pub const USEFULNESS: f64 = 1e-12;

/// Two case-(iib) bounds closer than this describe an empty interval.
pub const DEGENERACY: f64 = 1e-12;

/// Smallest tolerance accepted by the CHSH optimizer.
pub const CHSH_MIN_TOL: f64 = 1e-8;

/// Smallest bisection width accepted by the boundary search.
pub const BISECTION_MIN_TOL: f64 = 1e-12;
