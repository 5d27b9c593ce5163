use alloc::string::String;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    /// The result does not fit in an `f64`; `log_value` is its natural log when known.
    #[error("range error: {what} overflows (ln value {log_value})")]
    Range { what: &'static str, log_value: f64 },
    /// Quadrature or series did not reach the requested accuracy.
    #[error("accuracy target missed: value {value}, error estimate {error_estimate}")]
    Accuracy { value: f64, error_estimate: f64 },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource limit exceeded: {0}")]
    Resource(String),
    #[error("covariance matrix is not positive definite (smallest pivot {min_pivot:e})")]
    NotPositiveDefinite { min_pivot: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::Invalid(msg.into())
}
