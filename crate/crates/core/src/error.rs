use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("series must have at least one channel and one time step (got {channels}x{len})")]
    EmptySeries { channels: usize, len: usize },
    #[error("series buffer holds {got} values, expected {expected}")]
    BufferSize { expected: usize, got: usize },
    #[error("non-finite value at channel {channel}, t={t}")]
    NonFinite { channel: usize, t: usize },
    #[error("pyramid depth {depth} too large for series of length {len}")]
    DepthTooLarge { depth: usize, len: usize },
    #[error("series length {len} is shorter than the minimum base length {min_base}")]
    BaseLengthUnreachable { len: usize, min_base: usize },
    #[error("overlap must lie in [0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),
    #[error("degenerate features: {0}")]
    DegenerateFeatures(String),
    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: String, got: String },
    #[error("missing baseline {config} for dataset {dataset}")]
    MissingBaseline { dataset: String, config: String },
    #[error("missing ensemble member {member} for dataset {dataset}")]
    MissingMember { dataset: String, member: String },
    #[error("{}:{line}:{column}: {message}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("instance {index} has length {got}, expected {expected}")]
    UnequalLength {
        index: usize,
        expected: usize,
        got: usize,
    },
    #[error("line {line}: class label {label:?} not declared in @classLabel")]
    UnknownClassLabel { line: usize, label: String },
    #[error("unsupported format version {found} (expected {expected})")]
    VersionMismatch { expected: u32, found: u32 },
    #[error("invalid model blob: {0}")]
    InvalidBlob(String),
    #[error("checksum mismatch: {0}")]
    ChecksumMismatch(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            column,
            message: message.into(),
        }
    }

    pub(crate) fn shape(expected: impl ToString, got: impl ToString) -> Self {
        Error::ShapeMismatch {
            expected: expected.to_string(),
            got: got.to_string(),
        }
    }
}
