//! Crate-wide error type.

use std::path::PathBuf;

/// Errors produced by the pooler, the pipeline and the harness.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A configuration invariant was violated. The message names the invariant.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Runtime input did not match the configured shapes or ranges.
    #[error("invalid input: {0}")]
    Input(String),

    /// A derived quantity could not be computed from the given data.
    #[error("computation error: {0}")]
    Computation(String),

    /// A file could not be parsed (PGM header, manifest, snapshot, config).
    #[error("format error: {0}")]
    Format(String),

    /// An I/O operation failed; carries the offending path.
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn computation(msg: impl Into<String>) -> Self {
        Error::Computation(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
