use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the mining library and its file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("code length undefined for a pattern with zero usage")]
    UndefinedLength,

    #[error("oracle refuses inputs beyond its enumeration scale: {0}")]
    OracleScale(String),

    #[error("cannot build a signature from an empty weight map")]
    NoSignature,

    #[error("sketches are not comparable (different seed or sample count)")]
    IncomparableSketches,

    #[error("synthetic spec cannot be planted: {0}")]
    Unplantable(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::Parse { .. } | Error::Io { .. } => 2,
            Error::Config(_) | Error::Unplantable(_) => 3,
            Error::UndefinedLength
            | Error::OracleScale(_)
            | Error::NoSignature
            | Error::IncomparableSketches
            | Error::Internal(_) => 4,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
