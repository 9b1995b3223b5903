use thiserror::Error;

/// Errors raised by the number-theoretic kernels, the finite-field layer and
/// the zeta assembly.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{value} is not a unit modulo {p}^{k}")]
    NotAUnit { value: String, p: u64, k: u32 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("field of order {q} exceeds the configured bound {bound}")]
    TooLarge { q: u64, bound: u64 },

    #[error("character evaluated at zero")]
    ZeroArgument,

    #[error("Gauss sum check failed: |g|^2 deviates from q by {deviation:e}")]
    PrecisionExceeded { deviation: f64 },

    #[error("H_q(t) is not integral at working precision (residual {residual:e})")]
    IntegralityFailure { residual: f64 },

    #[error("point count does not give an integral H_q(t)")]
    NonIntegral,

    #[error("power sums inconsistent with a degree {degree} polynomial: {detail}")]
    DegreeMismatch { degree: usize, detail: String },

    #[error("zeta coefficient {index} is not an integer")]
    NonIntegralCoefficient { index: usize },

    #[error("not enough power sums to determine the zeta factor: {0}")]
    InsufficientData(String),

    #[error("Newton polygon has no slope-0 segment")]
    NoUnitRoot,

    #[error("Newton polygon slope-0 segment has length {0}")]
    MultipleUnitRoots(usize),

    #[error("factor does not divide: {0}")]
    FactorMismatch(String),

    #[error("internal consistency check failed: {0}")]
    ConsistencyFailure(String),

    #[error("prime {p} lies outside the printed coefficient table")]
    OutOfTable { p: u64 },
}

pub type Result<T> = std::result::Result<T, Error>;
