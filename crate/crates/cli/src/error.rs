use spurlab_core::Error as CoreError;
use std::path::PathBuf;
use thiserror::Error;

/// Front-end failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("config: {0}")]
    Config(String),

    #[error("io error on {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("numeric abort: {0}")]
    Numeric(CoreError),

    #[error("{0} check(s) failed")]
    CheckFailed(usize),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) | CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InvalidInput(_)
            | CoreError::DimensionMismatch { .. }
            | CoreError::NotPositiveDefinite(_)
            | CoreError::SmoothnessBelowConcavity { .. }
            | CoreError::TooFewRows { .. } => CliError::Config(e.to_string()),
            _ => CliError::Numeric(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::CheckFailed(2).exit_code(), 1);
        assert_eq!(CliError::Usage("x".into()).exit_code(), 2);
        assert_eq!(CliError::from(CoreError::TooFewRows { need: 4, got: 1 }).exit_code(), 2);
        assert_eq!(CliError::from(CoreError::NonFinite { what: "loss", step: 3 }).exit_code(), 3);
        assert_eq!(CliError::from(CoreError::AllSamplesDropped { round: 0 }).exit_code(), 3);
    }
}
