use thiserror::Error;

/// Errors returned by the library.
///
/// Input problems (bad exponents, shape mismatches, malformed documents) are
/// distinguished from guard violations so that callers can report them with
/// different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid exponent {0}: exponents must lie in [1, inf]")]
    InvalidExponent(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("guard exceeded for {what}: size {size} exceeds limit {limit}")]
    GuardExceeded { what: String, size: f64, limit: f64 },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
