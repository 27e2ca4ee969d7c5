use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("unknown generator symbol `{0}`")]
    UnknownGenerator(String),
    #[error("malformed word `{0}`")]
    MalformedWord(String),
    #[error("invalid group specification: {0}")]
    InvalidGroup(String),
    #[error("operands belong to different groups")]
    MismatchedOwners,
    #[error("window must be nonempty")]
    EmptyWindow,
    #[error("invalid window: {0}")]
    InvalidWindow(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("permutation dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("unsupported group for this construction: {0}")]
    UnsupportedGroup(String),
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid metric: {0}")]
    InvalidMetric(String),
    #[error("alphabet is not finite")]
    AlphabetNotFinite,
    #[error("unsupported alphabet: {0}")]
    UnsupportedAlphabet(String),
    #[error("instance too large: {0}")]
    TooLarge(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("{0}")]
    Unstable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
