use crate::exactfield::FieldError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{file}:{line}: {msg}")]
    Parse { file: String, line: usize, msg: String },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{0}")]
    Ring(String),
    #[error("underdetermined: {0}")]
    Underdetermined(String),
    #[error("inconsistent: {0}")]
    Inconsistent(String),
    #[error("non-terminating specialization: variable {var} appears with exponent {max_exp} and has unbounded declared support")]
    NonTerminating { var: String, max_exp: String },
    #[error("window: {0}")]
    Window(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(file: &str, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { file: file.to_string(), line, msg: msg.into() }
}
