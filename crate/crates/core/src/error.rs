use thiserror::Error;

/// Errors raised by the library.
///
/// `Domain` covers inputs that are mathematically invalid for an operation
/// (zero discriminant, indefinite form, cutoff below the certification
/// threshold); `Range` covers inputs that are valid but exceed a configured
/// computational limit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("range error: {0}")]
    Range(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn range(msg: impl Into<String>) -> Self {
        Error::Range(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
