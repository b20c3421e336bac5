use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: String, got: String },

    #[error("gap of {missing} frames after t={after} exceeds the {max}-frame repair limit")]
    GapTooLong { after: u64, missing: u64, max: u64 },

    #[error("stream does not cover t={t}: no bracketing sample for interpolation")]
    BoundaryGap { t: u64 },

    #[error("unknown MRC grade `{0}`")]
    UnknownGrade(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("recording too short: {0}")]
    TooShort(String),

    #[error("synchronization error: {0}")]
    Sync(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("schema mismatch: {0}")]
    Schema(String),

    #[error("model used before fit")]
    NotFitted,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing input {path}: {hint}")]
    MissingInput { path: PathBuf, hint: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
