use thiserror::Error;

use crate::term::Signature;

/// Errors from the term front-end.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum TermError {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("symbol `{symbol}` at byte {offset} is not in the {signature} signature")]
    UnknownSymbol {
        offset: usize,
        symbol: String,
        signature: Signature,
    },
    #[error("symbol `{symbol}` expects {expected} arguments, found {found}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("symbol `{symbol}` is not in the {signature} signature")]
    SignatureMismatch { symbol: String, signature: Signature },
    #[error("`<=` is not available in the {0} signature")]
    OrderUnavailable(Signature),
    #[error("invalid variable name `{0}`")]
    BadVariable(String),
    #[error("variable `{var}` is not one of y1..y{n}")]
    IndexOutOfRange { var: String, n: usize },
}

/// Library-level errors.
#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error(transparent)]
    Term(#[from] TermError),
    #[error("no decision procedure for {0} with a nonempty equation set")]
    UnsupportedSigma(Signature),
    #[error("unknown variety `{0}`")]
    UnknownVariety(String),
    #[error("expected {expected} terms, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    Problem { line: usize, message: String },
    #[error("internal verification failure: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
