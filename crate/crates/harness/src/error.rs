use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("every trial diverged for: {}", .0.join(", "))]
    AllDiverged(Vec<String>),
    #[error(transparent)]
    Core(#[from] perfdfo_core::Error),
}

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        HarnessError::Io { path: path.into(), source }
    }

    /// Process exit code for the CLI.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Core(_) => 2,
            HarnessError::Io { .. } => 3,
            HarnessError::AllDiverged(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
