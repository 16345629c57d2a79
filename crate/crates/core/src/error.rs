use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation precondition on mutable state was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Instance too large for an exhaustive routine.
    #[error("size limit exceeded: {0}")]
    Size(String),

    /// A statistic that is undefined on the given input.
    #[error("undefined value: {0}")]
    Undefined(String),

    /// An iterative numerical method failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
