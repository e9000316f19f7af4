use thiserror::Error;

/// Errors raised by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("series shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("constant term violation: {0}")]
    ConstantTerm(String),
    #[error("argument has nonzero constant term: {0}")]
    NonzeroValuation(String),
    #[error("cannot be Hopf: {0}")]
    CannotBeHopf(String),
    #[error("invalid system: {0}")]
    InvalidSystem(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error("series too short: {0}")]
    SeriesTooShort(String),
    #[error("invalid family data: {0}")]
    InvalidData(String),
    #[error("undefined entry: {0}")]
    Undefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;
