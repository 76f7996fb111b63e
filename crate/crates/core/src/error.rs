use std::fmt;

use thiserror::Error;

use crate::shape::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(ValidationReport),
    #[error("area invariant violated: {0}")]
    AreaInvariant(String),
    #[error("enumeration of n={n} exceeds the configured limit {limit}")]
    LimitExceeded { n: usize, limit: usize },
    #[error("area assignment infeasible: {0}")]
    Infeasible(String),
    #[error("extremal crossing x{crossing} has no neighbour on L (input is not normalized)")]
    NeighborMissing { crossing: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("postcondition failed: {0}")]
    AssertionFailure(String),
    #[error("no progress: {0}")]
    NonTermination(String),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl Error {
    /// Whether the error signals a broken postcondition rather than bad input.
    pub fn is_assertion(&self) -> bool {
        matches!(self, Error::AssertionFailure(_) | Error::NonTermination(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParseErrorClass {
    Syntax,
    Invariant,
}

impl fmt::Display for ParseErrorClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorClass::Syntax => f.write_str("syntax error"),
            ParseErrorClass::Invariant => f.write_str("invariant violation"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {class}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub class: ParseErrorClass,
    pub message: String,
}

impl ParseError {
    pub fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, class: ParseErrorClass::Syntax, message: message.into() }
    }

    pub fn invariant(line: usize, message: impl Into<String>) -> Self {
        ParseError { line, class: ParseErrorClass::Invariant, message: message.into() }
    }
}
