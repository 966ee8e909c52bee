use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("index entry {value} out of range [1, {n}]")]
    IndexOutOfRange { value: usize, n: usize },
    #[error("invalid multiindex: {0}")]
    InvalidIndex(String),
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("position {0} used twice")]
    PositionCollision(usize),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("inexact division")]
    InexactDivision,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },
    #[error("degree {d} is not feasible for (k, N) = ({k}, {n})")]
    InfeasibleDegree { k: usize, n: usize, d: usize },
    #[error("pattern has {0} entries; coarsening enumeration is limited to 12")]
    PatternTooLarge(usize),
    #[error("inconsistent factor data: {0}")]
    Inconsistent(String),
    #[error("missing base case for (k, N) = ({k}, {n})")]
    MissingBase { k: usize, n: usize },
    #[error("linear forms are dependent at T = 0: {0}")]
    DependentLimit(String),
    #[error("io error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
