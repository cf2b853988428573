use thiserror::Error;

#[derive(Debug, Error)]
pub enum LearnError {
    #[error("training data is empty")]
    EmptyData,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("training diverged at epoch {epoch}: loss {loss}")]
    Diverged { epoch: usize, loss: f64 },
    #[error("model import, line {line}: {msg}")]
    Import { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] gleak_core::Error),
}

pub type Result<T> = std::result::Result<T, LearnError>;
