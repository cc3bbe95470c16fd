use thiserror::Error;

/// Errors raised by parameter validation and numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Argument sits on a pole of the gamma function.
    #[error("gamma pole at x = {0}")]
    Pole(f64),

    /// Argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Parameters are structurally invalid for the requested operation.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParams(msg.into())
}
