use thiserror::Error;

/// Errors raised by the numeric kernels, the fitters and dataset ingestion.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("series diverges for z = {z} (requires 0 <= z < 1)")]
    DivergentSeries { z: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series did not converge within {max_terms} terms")]
    NoConvergence { max_terms: usize },

    #[error("numerical underflow: {0}")]
    NumericalUnderflow(String),

    #[error("degenerate case: {0}")]
    DegenerateCase(String),

    #[error("empty input")]
    EmptyInput,

    #[error("negative value {value} at position {index}")]
    NegativeValue { index: usize, value: f64 },

    #[error("all counts are zero")]
    ZeroTotal,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("total element count |M| is unknown")]
    MissingElementCount,

    #[error("zero variance in {0}")]
    ZeroVariance(&'static str),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
