//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative method failed to converge or a quadrature blew up.
    #[error("numeric error: {0}")]
    Numeric(String),
    /// A root was found but it lies on the wrong logarithmic branch.
    #[error("branch error: {0}")]
    Branch(String),
    /// No candidate passed the selection criteria.
    #[error("selection error: {0}")]
    Selection(String),
    /// Invalid user input (configuration, flags).
    #[error("usage error: {0}")]
    Usage(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
