use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("row {row} is not a probability distribution (sum {sum})")]
    NotStochastic { row: usize, sum: f64 },

    #[error("vector is not normalized (sum {0})")]
    NotNormalized(f64),

    #[error("invalid entry {value} at position {index}")]
    InvalidEntry { index: usize, value: f64 },

    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),

    #[error("unknown label {0:?}")]
    UnknownLabel(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("enumeration cap exceeded: {count} strategies > cap {cap}")]
    CapExceeded { count: f64, cap: u64 },

    #[error("expansion cap exceeded: {0}; fall back to channel pre-processing")]
    ExpansionCap(String),

    #[error("empty sample set")]
    EmptySampleSet,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
