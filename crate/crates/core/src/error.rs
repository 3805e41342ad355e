use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("element budget exceeded: {what} needs {needed} elements, budget is {budget}")]
    Budget {
        what: String,
        needed: usize,
        budget: usize,
    },
    #[error("interface error: {0}")]
    Interface(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn iface<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Interface(msg.into()))
}
