use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The requested Fock cutoff leaves more probability outside the
    /// representable space than the truncation allows.
    #[error("truncation too small: tail mass {tail:e} beyond n_max = {n_max} exceeds tolerance {tail_tol:e}")]
    TruncationTooSmall { n_max: usize, tail: f64, tail_tol: f64 },

    #[error("invalid truncation: {0}")]
    InvalidTruncation(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("two-mode dimension {dim} exceeds the configured limit of {limit}")]
    ResourceLimit { dim: usize, limit: usize },

    #[error("bessel_i0 argument {0} outside the supported range |x| < 700")]
    BesselOverflow(f64),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("insufficient angular coverage: {0}")]
    InsufficientCoverage(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
