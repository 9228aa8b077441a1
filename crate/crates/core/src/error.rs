use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a function (zero Hankel argument,
    /// non-finite input, divergent integral).
    #[error("domain error: {0}")]
    Domain(String),
    /// Argument outside the range where a series is usable.
    #[error("range error: {0}")]
    Range(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numerical error: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
