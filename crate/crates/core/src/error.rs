use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    /// An input violates a documented precondition (wrong petal, ε outside
    /// the orbit's window, non-parabolic germ, ...).
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// A formula evaluated outside its domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method did not converge or a fit is unusable.
    #[error("numerical failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
