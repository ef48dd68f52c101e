use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{routine} did not converge (residual {residual:e})")]
    NoConvergence { routine: &'static str, residual: f64 },

    #[error("numerical disagreement: {0}")]
    Disagreement(String),

    #[error("spectral gap violated: eigenvalue of modulus {modulus} is too close to radius {radius}")]
    GapViolation { modulus: f64, radius: f64 },

    #[error("recurrence breakdown: {0}")]
    Breakdown(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}
