use thiserror::Error;

/// Errors raised by the graph learning pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum MuglError {
    #[error("invalid pair index (i={i}, j={j}) for m={m}: need 1 <= j < i <= m")]
    InvalidIndex { i: usize, j: usize, m: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("too few samples: need at least 2, got {0}")]
    TooFewSamples(usize),

    #[error("confidence level delta={0} outside (0, e^-2)")]
    InvalidDelta(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point is not in the scaled simplex (sum={sum}, min={min}, s={s})")]
    InfeasiblePoint { sum: f64, min: f64, s: f64 },

    #[error("objective is not differentiable here: a^T w = {value} is below the floor {floor}")]
    NonsmoothPoint { value: f64, floor: f64 },

    #[error("point is outside the log-barrier domain (min degree {0})")]
    OutsideDomain(f64),

    #[error("line search did not terminate after {0} backtracking steps")]
    LineSearchStall(usize),

    #[error("symmetric eigendecomposition did not converge")]
    Decomposition,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("non-finite value in input: {0}")]
    NonFinite(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for MuglError {
    fn from(e: std::io::Error) -> Self {
        MuglError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, MuglError>;
