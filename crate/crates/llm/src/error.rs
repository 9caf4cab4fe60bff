use thiserror::Error;

use crate::transport::TransportError;

#[derive(Debug, Error)]
pub enum LlmError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("authentication rejected by the endpoint: {0}")]
    Auth(String),
    #[error("request failed after {attempts} attempts: {source}")]
    Transport {
        attempts: u32,
        #[source]
        source: TransportError,
    },
    #[error("invalid transcript: {0}")]
    Transcript(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Core(#[from] entropybench_core::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = LlmError> = std::result::Result<T, E>;
