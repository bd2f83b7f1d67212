use thiserror::Error;

use crate::minmax::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// The problem has a trivial or unbounded answer (e.g. degree >= grid size).
    #[error("degenerate problem: {0}")]
    DegenerateProblem(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("linear program failed: {0}")]
    Lp(#[from] LpError),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn numeric(msg: impl Into<String>) -> Self {
        Error::NumericFailure(msg.into())
    }

    /// True for errors caused by bad input rather than by a computation.
    pub fn is_usage_error(&self) -> bool {
        matches!(self, Error::InvalidArgument(_) | Error::DegenerateProblem(_))
    }
}
