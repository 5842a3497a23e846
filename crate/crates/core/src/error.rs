use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid quiver type `{0}`")]
    InvalidType(String),
    #[error("rank {rank} is not supported for type {family}: {reason}")]
    UnsupportedRank { family: char, rank: usize, reason: &'static str },
    #[error("graded dimension of e_{i}A({degree})e_{j} is {found}, the Hilbert series predicts {expected}")]
    HilbertMismatch { degree: usize, i: usize, j: usize, expected: usize, found: usize },
    #[error("the Frobenius form is degenerate")]
    DegenerateForm,
    #[error("degree {requested} needs a complex truncated above {requested}, but the truncation is {max_degree}")]
    TruncationTooShallow { requested: usize, max_degree: usize },
    #[error("no duality map satisfies the intertwining constraints: {0}")]
    NoSolution(String),
    #[error("duality map underdetermined, residual freedom of dimension {freedom} in {context}")]
    Underdetermined { freedom: usize, context: String },
    #[error("cannot assign labels in block {0}: no canonical splitting")]
    AmbiguousBlock(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
