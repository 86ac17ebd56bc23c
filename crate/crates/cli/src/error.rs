use lar_core::LarError;
use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid scenario at `{path}`: {message}")]
    Validation { path: String, message: String },

    #[error("{task}: numerical failure [{}]: {source}", source.code())]
    Numerical {
        task: String,
        #[source]
        source: LarError,
    },

    #[error("{failed} invariant(s) exceeded tolerance")]
    Invariant { failed: usize },
}

impl CliError {
    pub fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation { path: path.into(), message: message.into() }
    }

    pub fn numerical(task: impl Into<String>, source: LarError) -> Self {
        CliError::Numerical { task: task.into(), source }
    }

    /// 0 ok, 2 parse, 3 validation, 4 invariant failure, 5 numerical failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) => 2,
            CliError::Validation { .. } => 3,
            CliError::Invariant { .. } => 4,
            CliError::Numerical { .. } => 5,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
