use thiserror::Error;

/// Errors raised by the core library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("modulus {0} exceeds the supported bound 2^31")]
    ModulusTooLarge(u64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    #[error("{what} is too large ({value} > {limit})")]
    TooLarge {
        what: &'static str,
        value: u128,
        limit: u128,
    },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("vector does not lie in the sum-zero module V_0")]
    NotInDeletedModule,
    #[error("vector is zero")]
    ZeroVector,
    #[error("images do not form a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("matrix is not symmetric at ({row}, {col})")]
    Asymmetric { row: usize, col: usize },
    #[error("row {row} sums to {sum}, expected degree {degree}")]
    NotRegular { row: usize, sum: f64, degree: usize },
    #[error("element is outside the group")]
    OutsideGroup,
    #[error("orbit of v does not span V_0")]
    NotSpanning,
    #[error("generating set does not generate the group")]
    NotGenerating,
    #[error("not a semidirect decomposition: {0}")]
    NotSemidirect(String),
    #[error("catalog: {0}")]
    Catalog(String),
}

pub type Result<T> = std::result::Result<T, Error>;
