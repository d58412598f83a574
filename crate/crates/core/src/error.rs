use num_bigint::BigUint;
use thiserror::Error;

/// Errors produced by the arithmetic, criteria, counting and simulation layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("precision must be at least 1")]
    InvalidPrecision,
    #[error("operands live in different rings: Z/{left} vs Z/{right}")]
    RingMismatch { left: BigUint, right: BigUint },
    #[error("{0} is not a unit")]
    NonUnit(BigUint),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimMismatch { expected: usize, found: usize },
    #[error("matrix is not invertible (determinant {det} is divisible by p)")]
    NonInvertible { det: BigUint },
    #[error("precision {n} is below the semistability threshold {needed}")]
    PrecisionTooLow { n: u32, needed: u32 },
    #[error("bad parameter: {0}")]
    BadParam(String),
    #[error("enumeration would visit {predicted} elements, over budget {budget}")]
    TooLarge { predicted: BigUint, budget: u64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("the requested slice of the group is empty")]
    EmptySlice,
}

pub type Result<T> = std::result::Result<T, Error>;
