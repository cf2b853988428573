use thiserror::Error;

#[derive(Debug, Error)]
pub enum EstimateError {
    #[error(transparent)]
    Core(#[from] gleak_core::Error),
    #[error(transparent)]
    Learn(#[from] gleak_learn::LearnError),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("estimate {estimate} outside the gain range [{low}, {high}]")]
    OutOfRange { estimate: f64, low: f64, high: f64 },
    #[error("input: {0}")]
    Input(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, EstimateError>;
