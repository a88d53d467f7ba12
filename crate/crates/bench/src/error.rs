use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] ffs_core::Error),

    #[error("{path}: {message}")]
    Io { path: String, message: String },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },

    #[error("{0}")]
    Usage(String),
}

impl BenchError {
    /// Short machine-readable category for the one-line error report.
    pub fn kind(&self) -> &'static str {
        match self {
            BenchError::Core(ffs_core::Error::InvalidInstance(_)) => "invalid-instance",
            BenchError::Core(ffs_core::Error::Contract(_)) => "contract",
            BenchError::Core(ffs_core::Error::Config(_)) => "config",
            BenchError::Io { .. } => "io",
            BenchError::Parse { .. } => "parse",
            BenchError::Usage(_) => "usage",
        }
    }
}

pub type Result<T> = std::result::Result<T, BenchError>;
