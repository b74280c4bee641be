use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the readability pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("failed to read {path}: {source}")]
    Ingest {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("word `{0}` has no vowel and cannot be syllabified")]
    Unsyllabifiable(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("missing feature `{0}`")]
    MissingFeature(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("linear system is singular or ill-conditioned")]
    Singular,

    #[error("undefined statistic: {0}")]
    Undefined(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
