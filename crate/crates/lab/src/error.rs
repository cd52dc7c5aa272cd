use std::path::PathBuf;

use contagion_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {reason}")]
    Malformed { path: PathBuf, line: usize, reason: String },
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] CoreError),
}

impl LabError {
    /// 2 for bad input, 3 when a conditioning branch came up empty, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Core(CoreError::DegenerateConditioning { .. }) => 3,
            LabError::Core(_) | LabError::Config(_) | LabError::Malformed { .. } | LabError::Read { .. } => 2,
            LabError::Write { .. } => 1,
        }
    }
}
