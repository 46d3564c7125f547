//! Analysis toolkit for the two-clone output state of the Buzek-Hillery
//! copying machine.
//!
//! The state is a one-parameter family of two-qubit mixed states indexed by
//! the machine overlap `xi` and the (real) input amplitude `alpha`. For every
//! point of the `(xi, alpha^2)` plane the crate decides:
//!
//! * whether the clones are entangled ([`separability`]), using both the
//!   closed-form determinant test and a partial-transpose eigenvalue oracle;
//! * whether the state can violate the Bell-CHSH inequality ([`bell`]), via
//!   the correlation-matrix criterion and a direct numerical maximization;
//! * whether it is a useful teleportation channel ([`teleport`]), via the
//!   maximal-fidelity formula and an explicit Bell-measurement simulation.
//!
//! [`sweep`] assembles these into parameter sweeps, region maps and boundary
//! searches.

pub mod bell;
pub mod error;
pub mod linalg;
pub mod machine;
pub mod separability;
pub mod sweep;
pub mod teleport;
pub mod tolerance;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, TwoQubitState};
pub use machine::{InputState, MachineParameter};
pub use num_complex::Complex64;
