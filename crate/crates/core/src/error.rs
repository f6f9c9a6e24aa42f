use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty dataset")]
    EmptyDataset,

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid {name}: {message}")]
    InvalidParameter { name: &'static str, message: String },

    #[error("invalid distribution at position {position}: {message}")]
    InvalidDistribution { position: usize, message: String },

    #[error("label/class mismatch: {0}")]
    ClassMismatch(String),

    #[error("vocabulary mismatch: {0}")]
    VocabularyMismatch(String),

    #[error("training diverged at epoch {epoch}: loss is {loss}")]
    Diverged { epoch: usize, loss: f64 },

    #[error("remote backend transport failure ({endpoint}): {message}")]
    Transport { endpoint: String, message: String },

    #[error("remote backend protocol violation: {0}")]
    Protocol(String),

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    /// Transport failures may succeed on a later attempt; everything else is fatal.
    pub fn is_retriable(&self) -> bool {
        matches!(self, Error::Transport { .. })
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn param(name: &'static str, message: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            message: message.into(),
        }
    }
}
