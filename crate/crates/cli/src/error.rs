use std::path::PathBuf;

use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("invalid argument {flag}: {message}")]
    Argument { flag: &'static str, message: String },
    #[error(transparent)]
    Core(#[from] twoway_core::Error),
}

impl CliError {
    pub fn arg(flag: &'static str, message: impl Into<String>) -> Self {
        CliError::Argument { flag, message: message.into() }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn format(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        CliError::Format { path: path.into(), message: message.to_string() }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "io",
            CliError::Format { .. } => "format",
            CliError::Argument { .. } => "argument",
            CliError::Core(_) => "computation",
        }
    }

    /// Machine-readable record written to stderr on failure.
    pub fn record(&self) -> ErrorRecord {
        let path = match self {
            CliError::Io { path, .. } | CliError::Format { path, .. } => Some(path.display().to_string()),
            _ => None,
        };
        ErrorRecord { error: self.kind(), message: self.to_string(), path }
    }
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord {
    pub error: &'static str,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

pub type Result<T> = std::result::Result<T, CliError>;
