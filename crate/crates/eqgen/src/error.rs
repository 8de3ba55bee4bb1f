use thiserror::Error;

/// Errors produced by the library. The CLI maps each variant to an exit code.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("symbol `{symbol}` expects {expected} arguments, found {found}")]
    Arity {
        symbol: String,
        expected: usize,
        found: usize,
    },
    #[error("unknown nonterminal `{0}`")]
    UnknownNonterminal(String),
    #[error("invalid theory: {0}")]
    Theory(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// Short category tag used in diagnostics, e.g. `error[parse]`.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "parse",
            Error::UnknownSymbol(_) | Error::Arity { .. } | Error::UnknownNonterminal(_) => {
                "signature"
            }
            Error::Theory(_) => "theory",
            Error::Budget(_) => "budget",
            Error::Invalid(_) => "input",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
