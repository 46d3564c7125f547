use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{name} = {value} is outside the admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: String,
    },

    #[error("{name}: values outside the admissible range {range}: {offenders:?}")]
    OutOfRangeValues {
        name: &'static str,
        range: String,
        offenders: Vec<f64>,
    },

    #[error("not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("optimizer did not converge after {iterations} iterations (best value {best})")]
    NotConverged { iterations: usize, best: f64 },

    #[error("predicate {name} has the same value ({value}) at both ends of [{lo}, {hi}]")]
    NoSignChange {
        name: &'static str,
        lo: f64,
        hi: f64,
        value: bool,
    },
}
