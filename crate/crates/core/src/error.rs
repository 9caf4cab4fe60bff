use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("sequence too short: {what} needs at least {needed}, got {got}")]
    TooShort {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} does not fit in {width} bits")]
    ValueOutOfRange { value: u64, width: u32 },

    #[error("character {0:?} is not representable in the declared encoding")]
    Unrepresentable(char),

    #[error("trial {index} is not a permutation of 0..{n}: {reason}")]
    MalformedTrial {
        index: usize,
        n: usize,
        reason: String,
    },

    #[error("no usable values in {0}")]
    Empty(String),

    #[error("unsupported operation for source kind {0}")]
    UnsupportedSource(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("entropy source failure: {0}")]
    Entropy(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
