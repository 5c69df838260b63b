use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input violates a documented precondition (Hermiticity, unit trace, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    /// An iterative method hit its iteration cap.
    #[error("no convergence after {iterations} iterations: {context}")]
    NonConvergence { iterations: usize, context: String },

    /// The problem is degenerate (e.g. a one-dimensional span where two are needed).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}
