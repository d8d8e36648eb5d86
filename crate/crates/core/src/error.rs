use thiserror::Error;

/// Errors surfaced by scenario construction, planning and search.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed arguments, unknown ids, out-of-range parameters.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The scenario (or a derived sub-problem) admits no feasible plan.
    #[error("infeasible scenario: {0}")]
    Infeasible(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// Scenario or report files that do not match the expected schema.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
}
