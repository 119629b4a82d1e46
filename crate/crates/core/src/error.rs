use thiserror::Error;

/// Errors produced by the simulator and its analysis tools.
#[derive(Debug, Error)]
pub enum Error {
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("field kind mismatch: expected {expected}, found {found}")]
    KindMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("collocation resolution {size} is below the required {required} points per dimension ({reason})")]
    Resolution {
        size: usize,
        required: usize,
        reason: &'static str,
    },

    #[error("non-finite coefficients at t = {t}")]
    NonFinite { t: f64 },

    #[error("not enough records: {0}")]
    InsufficientRecords(String),

    #[error("regularization rejected: {0}")]
    Regularization(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
