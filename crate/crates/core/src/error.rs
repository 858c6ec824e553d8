use thiserror::Error;

/// Errors raised by the exact kernel and the constructions built on it.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("variable index {index} out of range for dimension {dimension}")]
    IndexOutOfRange { index: usize, dimension: usize },

    #[error("arity mismatch: expected {expected} components, got {actual}")]
    ArityMismatch { expected: usize, actual: usize },

    #[error("point has length {actual}, expected {expected}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("non-finite input coordinate")]
    NonFinite,

    #[error("root list is empty")]
    EmptyRoots,

    #[error("alpha must be a nonconstant univariate polynomial")]
    ConstantAlpha,

    #[error("alpha has a repeated root (gcd(alpha, alpha') has degree {gcd_degree})")]
    RepeatedRoots { gcd_degree: usize },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("interpolation nodes share the abscissa {0}")]
    DuplicateNodes(String),

    #[error("matrix is singular")]
    Singular,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
