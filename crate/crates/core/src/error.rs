//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: String,
        actual: String,
    },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("non-finite value encountered in {0}; update aborted")]
    NonFinite(&'static str),

    #[error("model too large for exact enumeration: {units} units exceeds limit {limit}; use the sampling estimator")]
    EnumerationTooLarge { units: usize, limit: usize },

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("data format error in {path}: {reason}")]
    DataFormat { path: String, reason: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error at {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn dims(context: &'static str, expected: impl ToString, actual: impl ToString) -> Self {
        Error::DimensionMismatch {
            context,
            expected: expected.to_string(),
            actual: actual.to_string(),
        }
    }

    pub(crate) fn io(path: impl ToString, source: std::io::Error) -> Self {
        Error::Io {
            path: path.to_string(),
            source,
        }
    }
}
