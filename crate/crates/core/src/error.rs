use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("degree {degree} exceeds the small-degree ceiling {ceiling}")]
    DegreeCeiling { degree: u64, ceiling: u64 },

    #[error("zero input: {0}")]
    ZeroInput(&'static str),

    #[error("matrix is not primitive")]
    NotPrimitive,

    #[error("vector is not in the column span: {0}")]
    NotInSpan(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("ceiling exceeded: {0}")]
    Ceiling(String),
}

pub type Result<T> = std::result::Result<T, Error>;
