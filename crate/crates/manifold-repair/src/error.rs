//! Error type shared by the whole crate.
//!
//! Variants map onto the process exit codes used by the CLI:
//! parse/validation problems exit 2, numerical aborts exit 3, I/O failures
//! exit 4.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// All failure modes surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument violates a documented precondition (dimension mismatch,
    /// non-finite value, out-of-range parameter, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Not enough data to perform the operation (e.g. fill distance of a
    /// single point).
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    /// A file failed to parse; `detail` names the offending line or byte
    /// offset where possible.
    #[error("parse error in {path}: {detail}")]
    Parse {
        /// Path of the file being parsed.
        path: String,
        /// Human-readable description including line/offset information.
        detail: String,
    },

    /// The optimizer produced a non-finite update and aborted.
    #[error("numerical abort at point {point_index}: {detail}")]
    Numerical {
        /// Index of the point whose update became non-finite.
        point_index: usize,
        /// Description of the failure.
        detail: String,
    },

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for this error per the CLI contract.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) | Error::InsufficientData(_) | Error::Parse { .. } => 2,
            Error::Numerical { .. } => 3,
            Error::Io(_) => 4,
        }
    }

    /// Shorthand constructor for [`Error::InvalidInput`].
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// Shorthand constructor for [`Error::InsufficientData`].
    pub fn insufficient(msg: impl Into<String>) -> Self {
        Error::InsufficientData(msg.into())
    }

    /// Shorthand constructor for [`Error::Parse`].
    pub fn parse(path: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            detail: detail.into(),
        }
    }
}
