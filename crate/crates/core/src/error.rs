use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),

    #[error("graph is not connected: {0}")]
    Disconnected(String),

    #[error("requested size is invalid: {0}")]
    Size(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("degenerate distance between node {node} and pivot {pivot}")]
    DegenerateDistance { node: usize, pivot: usize },

    #[error("degenerate layout: {0}")]
    DegenerateLayout(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
