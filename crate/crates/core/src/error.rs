use thiserror::Error;

/// Errors raised by the spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("denominator must be positive")]
    ZeroDenominator,

    #[error("denominator {0} does not fit a machine period")]
    PeriodTooLarge(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("root finder failed to bracket a crossing of level {level} on [{lo}, {hi}]")]
    NotBracketed { lo: f64, hi: f64, level: f64 },

    #[error("expected {expected} zeros of the Chambers discriminant, found {found}")]
    MissingZeros { expected: usize, found: usize },

    #[error("resolvent unbounded at z = {re} + {im}i")]
    ResolventUnbounded { re: f64, im: f64 },

    #[error("non-hyperbolic factor: eigenvalue modulus {modulus}")]
    NonHyperbolic { modulus: f64 },

    #[error("approximant too coarse: l0 = {l0} outside [1, {max}]")]
    ApproximantTooCoarse { l0: u64, max: u64 },

    #[error("truncated resolvent not converged: boundary tail {tail:e} at size {size}")]
    TruncationNotConverged { tail: f64, size: usize },

    #[error("eta = C^-q delta^2 is not representable at level {level}")]
    EtaUnderflow { level: usize },

    #[error("cover hypothesis violated at n = {n} in family {family}")]
    CoverHypothesis { n: usize, family: u8 },
}

pub type Result<T> = std::result::Result<T, Error>;
