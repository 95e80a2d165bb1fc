use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported quadrature order {order} (supported: 2..={cap})")]
    UnsupportedOrder { order: usize, cap: usize },

    #[error("invalid quadrature spec: {0}")]
    InvalidSpec(String),

    #[error("integrand returned non-finite value {value} at {point:?}")]
    Integrand { value: f64, point: Vec<f64> },

    #[error("unsupported dimension {0} (expected 2 or 4)")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("invalid velocity beta = {0}: |beta| must be < 1")]
    InvalidVelocity(f64),

    #[error("degenerate projection: smallest singular value {0:e} is below the rank tolerance")]
    DegenerateProjection(f64),

    #[error("imaginary residual {0:e} exceeds 1e-8")]
    ImaginaryResidual(f64),

    #[error("covariance is not symmetric positive-definite: {0}")]
    NotPositiveDefinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
