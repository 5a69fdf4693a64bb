use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),

    #[error("{what} out of range: {value}")]
    Range { what: &'static str, value: i64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A simulation invariant failed. Always a bug in the remapping logic.
    #[error("invariant violation: {0}")]
    Invariant(String),

    #[error("empty search space")]
    EmptySearchSpace,

    #[error("trace {0} contains no columns")]
    EmptyTrace(PathBuf),

    #[error("error sample set is empty")]
    EmptyStats,

    #[error("malformed trace {path}: line {line}: {msg}")]
    Trace {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
