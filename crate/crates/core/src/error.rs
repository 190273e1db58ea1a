use thiserror::Error;

/// Errors raised when constructing model values or evaluating outside a domain.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("channel gain must be positive and finite, got {0}")]
    InvalidGain(f64),
    #[error("channel gains must be ordered h1 >= h2, got h1 = {h1}, h2 = {h2}")]
    Unordered { h1: f64, h2: f64 },
    #[error("target rate must be positive and finite, got {0}")]
    InvalidRate(f64),
    #[error("transmit power must be non-negative and finite, got {0}")]
    InvalidPower(f64),
    #[error("variance must be positive and finite, got {0}")]
    InvalidVariance(f64),
    #[error("{0} must be at least 1")]
    EmptyCount(&'static str),
    #[error("grid needs at least {min} points, got {got}")]
    GridTooSmall { got: usize, min: usize },
    #[error("{what} = {value} is outside the domain ({domain})")]
    OutOfDomain {
        what: &'static str,
        value: f64,
        domain: String,
    },
}

pub type Result<T> = std::result::Result<T, ModelError>;
