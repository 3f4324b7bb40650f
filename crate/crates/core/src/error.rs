use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("residue {value} out of range for Z_{q}")]
    ResidueOutOfRange { value: u32, q: u32 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u8, right: u8 },

    #[error("unsupported modulus q={q}: {reason}")]
    UnsupportedModulus { q: u32, reason: &'static str },

    #[error("matrix is not dephased")]
    NotDephased,

    #[error("matrix is not a Butson Hadamard matrix")]
    NotButson,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("memory budget exceeded: need {needed} bytes, cap is {cap} bytes")]
    MemoryBudget { needed: u64, cap: u64 },

    #[error("non-integral result: {0}")]
    NonIntegral(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("search stopped after {completed} of {total} work units; resume from the journal")]
    Incomplete { completed: usize, total: usize },

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }
}
