use thiserror::Error;

/// Every fallible operation in the crate reports one of these.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime below 2^16")]
    NotPrime(u64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("modulus mismatch: F_{0} vs F_{1}")]
    ModulusMismatch(u32, u32),

    #[error("vector {0:?} is not in the enclosing subspace")]
    NotContained(Vec<u32>),

    #[error("operands live in different algebras")]
    AlgebraMismatch,

    #[error("unbounded enumeration: {0}")]
    Unbounded(String),

    #[error("undefined: {0}")]
    Undefined(String),

    #[error("invalid argument: {0}")]
    Invalid(String),

    /// Malformed input to the spectral sequence engine (d^2 != 0, dead
    /// sources or targets, differentials leaving E1).
    #[error("spectral sequence: {0}")]
    Sequence(String),

    #[error("differential pattern is not unique; lowest undetermined class {label} in stem {stem}")]
    Ambiguous { label: String, stem: i64 },

    #[error("no differential pattern satisfies the constraints: {0}")]
    Inconsistent(String),

    /// A pipeline result disagreed with an independently computed answer.
    #[error("verification failed: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
