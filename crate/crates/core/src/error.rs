use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unknown code name `{0}`")]
    UnknownCode(String),

    #[error("matrix is rank deficient (numeric rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },

    #[error("search space too large: {size} exceeds limit {limit}")]
    SearchSpaceTooLarge { size: u128, limit: u128 },

    #[error("malformed code file {path}: {reason}")]
    MalformedCodeFile { path: PathBuf, reason: String },

    #[error("block profile is inconsistent with the code: {0}")]
    ProfileMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
