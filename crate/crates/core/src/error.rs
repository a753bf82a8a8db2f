use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = FadeError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum FadeError {
    #[error("dimension error in {op}: {left:?} vs {right:?}")]
    Dimension {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    #[error("empty input to {0}")]
    Empty(&'static str),

    #[error("backward requires a scalar loss, got shape {0:?}")]
    NonScalarLoss((usize, usize)),

    #[error("training error at step {step}: {detail}")]
    Training { step: u64, detail: String },

    #[error("non-finite loss at epoch {epoch}, batch {batch}")]
    NonFiniteLoss { epoch: usize, batch: usize },

    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("validation error for instance {id}: {detail}")]
    Validation { id: String, detail: String },

    #[error("split error: {0}")]
    Split(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint version mismatch: file has {found}, expected {expected}")]
    CheckpointVersion { found: u32, expected: u32 },

    #[error("corrupt checkpoint: {0}")]
    CorruptCheckpoint(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl FadeError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        FadeError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn dim(op: &'static str, left: (usize, usize), right: (usize, usize)) -> Self {
        FadeError::Dimension { op, left, right }
    }

    /// Coarse classification used for process exit codes and C error codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            FadeError::Config(_) => ErrorKind::Config,
            FadeError::Parse { .. }
            | FadeError::Validation { .. }
            | FadeError::Split(_)
            | FadeError::CheckpointVersion { .. }
            | FadeError::CorruptCheckpoint(_)
            | FadeError::Json(_) => ErrorKind::Data,
            FadeError::Io { .. } => ErrorKind::Io,
            FadeError::Dimension { .. }
            | FadeError::Domain { .. }
            | FadeError::Empty(_)
            | FadeError::NonScalarLoss(_)
            | FadeError::Training { .. }
            | FadeError::NonFiniteLoss { .. } => ErrorKind::Numeric,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Io,
    Numeric,
}
