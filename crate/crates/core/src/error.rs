use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("construction error: {0}")]
    Construction(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("quadrature error: {0}")]
    Quadrature(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("generator error: {0}")]
    Generator(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
