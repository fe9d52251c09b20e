use thiserror::Error;

/// Errors raised by the geometric and analytic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The exponent is outside the supported regime `p < 1`.
    #[error("unsupported exponent p = {0}; only p < 1 is supported")]
    UnsupportedExponent(f64),
    /// The input does not describe a full-dimensional body.
    #[error("degenerate geometry: {0}")]
    Degenerate(String),
    #[error("invalid parameters: {0}")]
    Parameter(String),
    /// Derivatives requested at a point where the closed form is singular.
    #[error("singular point: {0}")]
    Singular(String),
    #[error("invalid problem: {0}")]
    Problem(String),
    #[error("meshing error: {0}")]
    Meshing(String),
    #[error("schema error: {0}")]
    Schema(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_finite() && p < 1.0 {
        Ok(())
    } else {
        Err(Error::UnsupportedExponent(p))
    }
}
