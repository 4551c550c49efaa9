use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument outside the domain of the operation (bad id, probability, stage index, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// The per-call query budget ran out. Oracles surface this instead of silently
    /// returning a partial answer.
    #[error("query budget exceeded: cap of {cap} neighbor queries reached")]
    BudgetExceeded { cap: u64 },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("cannot construct instance: {0}")]
    Construction(String),

    #[error("state error: {0}")]
    State(String),

    /// A structural invariant of the recursive simulation was violated.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
