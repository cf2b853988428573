use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("exact vulnerability is {0}; normalized errors are undefined")]
    ZeroVulnerability(f64),
    #[error(transparent)]
    Estimate(#[from] gleak_estimate::EstimateError),
    #[error(transparent)]
    Core(#[from] gleak_core::Error),
    #[error(transparent)]
    Learn(#[from] gleak_learn::LearnError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HarnessError>;

/// Process exit code for an error: 3 for numerical failures, 2 otherwise.
pub fn exit_code(err: &HarnessError) -> i32 {
    use gleak_estimate::EstimateError as E;
    let core_numeric = |e: &gleak_core::Error| matches!(e, gleak_core::Error::Degenerate(_));
    let learn_numeric = |e: &gleak_learn::LearnError| match e {
        gleak_learn::LearnError::Diverged { .. } => true,
        gleak_learn::LearnError::Core(c) => core_numeric(c),
        _ => false,
    };
    let numeric = match err {
        HarnessError::ZeroVulnerability(_) => true,
        HarnessError::Core(e) => core_numeric(e),
        HarnessError::Learn(e) => learn_numeric(e),
        HarnessError::Estimate(e) => match e {
            E::OutOfRange { .. } => true,
            E::Core(c) => core_numeric(c),
            E::Learn(l) => learn_numeric(l),
            _ => false,
        },
        _ => false,
    };
    if numeric {
        3
    } else {
        2
    }
}
