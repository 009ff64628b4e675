use std::fmt;

use thiserror::Error;

/// Errors raised by the library. Numerical failures during training are not
/// errors: they are reported as divergence flags on the trajectory.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, found {found}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("columns are linearly dependent (column {0})")]
    DependentColumns(usize),

    #[error("numerical domain error: {0}")]
    NumericalDomain(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn contract(msg: impl fmt::Display) -> Self {
        Error::Contract(msg.to_string())
    }

    pub(crate) fn config(line: usize, msg: impl fmt::Display) -> Self {
        Error::Config {
            line,
            message: msg.to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(context: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            context,
            expected,
            found,
        })
    }
}
