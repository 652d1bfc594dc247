use thiserror::Error;

use crate::interval::IntervalError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid solution: {0}")]
    InvalidSolution(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{size} points exceeds exact threshold {limit}")]
    ExceedsExactThreshold { size: usize, limit: usize },

    #[error("{size} terminals exceeds exact group threshold {limit}")]
    ExceedsExactGroupThreshold { size: usize, limit: usize },

    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Interval(#[from] IntervalError),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io { path: path.as_ref().display().to_string(), source }
    }
}
