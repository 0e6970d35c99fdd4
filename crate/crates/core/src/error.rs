//! Crate-wide error type. One variant per documented error class so callers
//! and tests can match on the class that a given failure is specified to be.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed record in a line-delimited file.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    /// A record or structure violated a stated invariant.
    #[error("validation error on `{field}`: {msg}")]
    Validation { field: String, msg: String },

    /// A binary file does not match its declared layout.
    #[error("format error: {0}")]
    Format(String),

    /// Incompatible matrix or vector dimensions.
    #[error("shape error: {0}")]
    Shape(String),

    /// Invalid configuration value.
    #[error("config error: {0}")]
    Config(String),

    /// Invalid argument to an operation.
    #[error("input error: {0}")]
    Input(String),

    /// The external judge failed to produce a usable reply.
    #[error("judge error: {msg} (raw reply: {raw:?})")]
    Judge { msg: String, raw: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn shape(msg: impl Into<String>) -> Self {
        Error::Shape(msg.into())
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn validation(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            msg: msg.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
