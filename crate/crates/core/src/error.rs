use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix has rank zero")]
    DegenerateRank,

    #[error("entry {value} exceeds the magnitude bound {bound}")]
    EntryBound { value: String, bound: i64 },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("basis block is singular")]
    SingularBasis,

    #[error("zero vector has no primitive part")]
    ZeroVector,

    #[error("index {index} out of range for length {len}")]
    Index { index: usize, len: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("not a valid line multiset: {0}")]
    InvalidNu(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
