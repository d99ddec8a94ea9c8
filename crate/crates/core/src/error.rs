use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus {0} must be odd and at least 3")]
    InvalidModulus(u64),
    #[error("{0} is not a unit modulo {1}")]
    NotUnit(i64, u64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("element out of range: {0}")]
    OutOfRange(String),
    #[error("ill-defined map or form: {0}")]
    IllDefined(String),
    #[error("element has no preimage")]
    NoPreimage,
    #[error("degenerate form: {0}")]
    Degenerate(String),
    #[error("not symplectic: {0}")]
    NotSymplectic(String),
    #[error("map is not invertible on its domain")]
    NotInvertible,
    #[error("too large: {0}")]
    TooLarge(String),
    #[error("value {re}{im:+}i is not within tolerance of a fourth root of unity times sqrt({scale})")]
    SnapFailure { re: f64, im: f64, scale: u64 },
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("retry budget exhausted: {0}")]
    RetryExhausted(String),
}
