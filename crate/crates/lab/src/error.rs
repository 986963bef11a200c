use thiserror::Error;

use crate::literal::LiteralError;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("config error: {0}")]
    Config(String),
    /// A standing hypothesis of the construction fails for the configured law.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error(transparent)]
    Literal(#[from] LiteralError),
    #[error(transparent)]
    Core(#[from] fppflow_core::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("experiment aborted: {0}")]
    Aborted(String),
}

impl LabError {
    /// Process exit code: 2 for anything wrong with the input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) | LabError::Hypothesis(_) | LabError::Literal(_) => 2,
            _ => 1,
        }
    }
}
