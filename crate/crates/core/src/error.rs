use thiserror::Error;

/// Errors raised by the numerical modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(
        "eigensolver did not converge after {iterations} iterations \
         (lambda = {lambda}, last eigenvector change = {last_change:e})"
    )]
    EigenNotConverged {
        lambda: f64,
        iterations: usize,
        last_change: f64,
    },

    #[error("minimum of the dispersion curve sits on the scan boundary [{lower}, {upper}]")]
    BracketFailure { lower: f64, upper: f64 },

    #[error("non-finite value detected at t = {time}")]
    NonFinite { time: f64 },

    #[error("front at x = {front} came within 10 cells of the x boundary at t = {time}")]
    BoundaryReached { time: f64, front: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
