use std::io;
use std::path::{Path, PathBuf};

use gff_core::error::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum GffError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("malformed field container: {0}")]
    Format(String),
    /// Carries the JSON verdict so it is still printed.
    #[error("{failed} check(s) failed")]
    VerifyFailed { failed: usize, report: String },
}

pub type Result<T> = std::result::Result<T, GffError>;

impl GffError {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    /// Process exit status: 1 failed verification or IO, 2 invalid input,
    /// 3 numerical failure, 4 resource limit.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Core(e) => match e {
                CoreError::Domain(_) | CoreError::Invalid(_) | CoreError::Unsupported(_) => 2,
                CoreError::Range { .. } | CoreError::Accuracy { .. } | CoreError::NotPositiveDefinite { .. } => 3,
                CoreError::Resource(_) => 4,
            },
            Self::Config(_) | Self::Format(_) => 2,
            Self::Io { .. } | Self::VerifyFailed { .. } => 1,
        }
    }
}
