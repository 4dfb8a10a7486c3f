use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by oracles, solvers, and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("sample index {index} out of range for a dataset of {size} samples")]
    InvalidSample { index: u64, size: u64 },

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("diagnostic unavailable: {0}")]
    UnavailableDiagnostic(String),

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("data error in {path}: {message}")]
    Data { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::ContractViolation(msg.into())
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
