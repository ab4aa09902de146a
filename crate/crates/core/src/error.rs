use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// A precondition on the arguments was violated.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A configured resource budget would be exceeded.
    #[error("resource budget exceeded: {what} needs {needed}, budget is {budget}")]
    Resource {
        what: &'static str,
        needed: String,
        budget: String,
    },

    /// An interval comparison could not be decided at the current working
    /// precision. Callers running under [`crate::arith::escalate`] retry at a
    /// higher precision.
    #[error("comparison undecided at current precision")]
    Undecided,

    /// Precision escalation reached its cap without deciding a comparison.
    #[error("comparison still undecided at the precision cap of {bits} bits")]
    PrecisionExhausted { bits: u32 },

    /// A construction did not produce a valid object for the given inputs.
    #[error("construction failed: {0}")]
    Construction(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn argument(msg: impl Into<String>) -> Error {
    Error::Argument(msg.into())
}
