use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("trajectory length mismatch: {left} vs {right} points")]
    LengthMismatch { left: usize, right: usize },

    #[error("sampling interval mismatch: {left} s vs {right} s")]
    RateMismatch { left: f64, right: f64 },

    #[error("trajectory set is empty")]
    EmptySet,

    #[error("trajectory corpus is empty")]
    EmptyCorpus,

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("no hit records to aggregate")]
    EmptyRecords,

    #[error("corpus of {size} trajectories exceeds the exhaustive search limit of {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("corpus has no seed states")]
    MissingSeedStates,

    #[error("k = {k} is outside 1..={modes}")]
    KOutOfRange { k: usize, modes: usize },

    #[error("feature vector has {got} entries, model expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("duplicate mode at index {index}")]
    DuplicateMode { index: usize },

    #[error("invalid range: {0}")]
    InvalidRange(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("instance {index}: {source}")]
    Instance {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: line {line}: {message}")]
    Format {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn at_instance(self, index: usize) -> Self {
        Error::Instance {
            index,
            source: Box::new(self),
        }
    }
}
