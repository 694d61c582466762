use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Csv(#[from] csv::Error),

    #[error("parse error in {file}, row {row}, column {column}: {message}")]
    Parse {
        file: String,
        row: usize,
        column: usize,
        message: String,
    },

    #[error("inconsistent channels: {0}")]
    InconsistentChannels(String),

    #[error("identification needs at least 2 subjects, found {0}")]
    TooFewSubjects(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected} features, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("subject {subject} has {count} segment(s); stratified split needs at least 2")]
    InsufficientSegments { subject: String, count: usize },

    #[error("training diverged: non-finite loss at epoch {epoch}")]
    NonFiniteLoss { epoch: usize },

    #[error("degenerate normalization: curve is constant")]
    DegenerateNormalization,

    #[error("duration ranges do not overlap")]
    NoOverlap,
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
