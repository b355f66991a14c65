use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A user-supplied function returned NaN or an infinity at a collocation node.
    #[error("{what} is not finite at node {node:?}")]
    NonFinite { what: &'static str, node: Vec<f64> },

    #[error("resource limit: {0}")]
    Resource(String),

    #[error(
        "eigenvector matrix is too ill-conditioned (estimate {condition:.3e}); use dense exponential evolution instead"
    )]
    Defective { condition: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
