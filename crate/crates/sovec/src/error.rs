//! Crate-wide error type.

use std::path::Path;

/// Errors produced by any sovec operation.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Filesystem failure, annotated with the offending path.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    /// Malformed input data, located by file and line number.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Invalid hyperparameters or mismatched dimensions.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The training objective became non-finite.
    #[error("objective diverged at epoch {epoch}; try a smaller learning rate (--eta)")]
    Diverged { epoch: usize },

    /// An operation is mathematically undefined for the given input
    /// (zero-norm vector, constant ranking, degenerate dataset, ...).
    #[error("{0}")]
    Degenerate(String),
}

impl Error {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    pub(crate) fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.display().to_string(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
