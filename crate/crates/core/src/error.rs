use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the detector, classifier, stream and evaluation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied data of the wrong shape or content.
    #[error("invalid input: {0}")]
    Input(String),

    /// A configuration value is out of range.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A dataset file could not be parsed; `line` is 0 for whole-file problems.
    #[error("{}: {message}", location(path, *line))]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// The requested parameters fall outside an embedded table.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

fn location(path: &std::path::Path, line: usize) -> String {
    if line == 0 {
        path.display().to_string()
    } else {
        format!("{}:{line}", path.display())
    }
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
