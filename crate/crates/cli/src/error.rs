use std::path::PathBuf;

use szego_core::SzegoError;
use thiserror::Error;

/// Process exit statuses. Stable: scripts and CI depend on them.
pub mod exit {
    pub const PASS: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const TOLERANCE: i32 = 2;
    pub const INPUT: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },

    #[error("malformed JSON at line {line}, column {column}: {message}")]
    Json { line: usize, column: usize, message: String },

    /// Structural problem at a JSON pointer path ("" is the document root).
    #[error("at '{pointer}': {message}")]
    Schema { pointer: String, message: String },

    /// Well-formed JSON describing invalid data.
    #[error("at '{pointer}': {source}")]
    Invalid { pointer: String, source: SzegoError },

    #[error("invalid arguments: {0}")]
    Usage(String),

    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },

    #[error("cannot read table {path}: {message}")]
    Table { path: PathBuf, message: String },

    #[error(transparent)]
    Numerics(#[from] SzegoError),
}

impl CliError {
    pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Schema { pointer: pointer.into(), message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Read { .. } | Self::Json { .. } | Self::Schema { .. } | Self::Invalid { .. } | Self::Usage(_) => {
                exit::INPUT
            }
            Self::Write { .. } => exit::INTERNAL,
            Self::Table { .. } => exit::INPUT,
            Self::Numerics(e) => match e {
                SzegoError::EmptySequence
                | SzegoError::NonFinite { .. }
                | SzegoError::NegativeSobolev(_)
                | SzegoError::BNotNormalized(_)
                | SzegoError::RootInsideDisc { .. }
                | SzegoError::CommonFactor { .. }
                | SzegoError::DegreePattern { .. }
                | SzegoError::ZeroRank
                | SzegoError::NotInVd { .. }
                | SzegoError::InvalidParameters(_)
                | SzegoError::InvalidAngles(_)
                | SzegoError::InvalidArgument(_) => exit::INPUT,
                SzegoError::Truncation { .. } => exit::TOLERANCE,
                _ => exit::INTERNAL,
            },
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
