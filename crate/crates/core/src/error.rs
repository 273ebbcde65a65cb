use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// No allocation gives every agent a positive value.
    #[error("instance is infeasible: {0}")]
    Infeasible(String),

    /// An iterative solver stopped before certifying the requested accuracy.
    /// `lower` and `upper` bracket the optimal (log) value as far as it got.
    #[error("solver did not converge: {reason} (bracket [{lower}, {upper}])")]
    Convergence {
        reason: String,
        lower: f64,
        upper: f64,
    },

    /// The problem exceeds what exact counting can handle.
    #[error("size limit exceeded: {0}")]
    Capability(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("objective is unbounded below: {0}")]
    Unbounded(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }
}
