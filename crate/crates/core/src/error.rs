use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not skew-symmetric at ({0}, {1})")]
    SkewSymmetryViolation(usize, usize),

    #[error("value {value} at {location} lies outside [-1, 1]")]
    RangeViolation { location: String, value: f64 },

    #[error("nonzero diagonal entry at index {0}")]
    DiagonalViolation(usize),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("gamma {gamma} is below the admissible minimum 2K = {min}")]
    GammaTooSmall { gamma: f64, min: f64 },

    #[error("solver did not converge after {iterations} iterations (violation {violation:e})")]
    NotConverged { iterations: usize, violation: f64 },

    #[error("linear program is infeasible")]
    Infeasible,

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("horizon {horizon} is shorter than 4K * RegSq(T) = {required}")]
    HorizonTooShort { horizon: usize, required: f64 },

    #[error("unsupported oracle kind: {0}")]
    UnsupportedOracle(String),

    #[error("unknown context: {0}")]
    UnknownContext(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// True for errors raised by one of the numerical solvers.
    pub fn is_solver_failure(&self) -> bool {
        matches!(
            self,
            Error::NotConverged { .. } | Error::Infeasible | Error::Unbounded
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
