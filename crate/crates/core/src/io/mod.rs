//! File formats: binary PGM (P5) and raw little-endian float64 dumps with a
//! plain-text `key=value` sidecar header.

pub mod pgm;
pub mod raw;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("malformed {kind}: {reason}")]
    Format { kind: &'static str, reason: String },
}

impl IoError {
    pub(crate) fn format(kind: &'static str, reason: impl Into<String>) -> Self {
        IoError::Format { kind, reason: reason.into() }
    }
}
