use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] entropybench_core::Error),
    #[error(transparent)]
    Llm(#[from] entropybench_llm::LlmError),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        use entropybench_llm::LlmError;
        match self {
            CliError::Usage(_) | CliError::Llm(LlmError::Config(_) | LlmError::InvalidArgument(_)) => 2,
            CliError::Core(entropybench_core::Error::InvalidParameter(_)) => 2,
            _ => 3,
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;
