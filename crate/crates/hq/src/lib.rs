//! Command-line front end, file formats and a kernel cache for the
//! `hq-core` Hermite quadrature library.

pub mod cache;
pub mod cli;
pub mod format;
pub mod table;
pub mod verify;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("malformed document: {0}")]
    Format(String),
    #[error(transparent)]
    Numerical(#[from] hq_core::Error),
    /// A computation finished but reported failed checks; carries the report.
    #[error("one or more checks failed")]
    Failed(String),
}

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Format(_) | Self::Numerical(_) | Self::Failed(_) => 2,
        }
    }
}
