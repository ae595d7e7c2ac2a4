//! Error types shared across the toolkit.
//!
//! Errors split into three classes which the CLI maps onto stable exit
//! codes: input errors (bad words, unknown generators, malformed files),
//! mathematical failures (an assertion the theory predicts should hold
//! fails to hold), and budget exhaustion.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("words belong to different alphabets")]
    AlphabetMismatch,

    #[error("unknown generator {name:?} for this alphabet")]
    UnknownGenerator { name: String },

    #[error("budget exceeded while {what}")]
    BudgetExceeded { what: String },

    #[error("endomorphism has no verified inverse")]
    NoInverse,

    #[error("images do not form a free basis: {reason}")]
    NotAnAutomorphism { reason: String },

    #[error("word is not a member of the given subgroup")]
    NotInSubgroup,

    #[error("group parameters do not match: {0}")]
    ParamMismatch(String),

    #[error("invalid hydra word: {0}")]
    InvalidHydra(String),

    #[error("relator {name} does not map to the identity")]
    RelatorFails { name: String },

    #[error("preimage check failed for generator {name}")]
    PreimageFails { name: String },

    #[error("verification check failed: {0}")]
    CheckFails(String),

    #[error("counterexample found: {0}")]
    CounterexampleFound(String),

    #[error("link graph has no vertices")]
    EmptyGraph,

    #[error("corner angle data is missing or inconsistent: {0}")]
    AngleMismatch(String),

    #[error("invalid presentation: {0}")]
    BadPresentation(String),
}

impl Error {
    pub fn budget(what: impl Into<String>) -> Self {
        Error::BudgetExceeded { what: what.into() }
    }

    /// Exit-code class used by the command-line surface:
    /// 1 mathematical failure, 2 input error, 3 budget exhaustion.
    pub fn exit_class(&self) -> u8 {
        match self {
            Error::Parse { .. }
            | Error::AlphabetMismatch
            | Error::UnknownGenerator { .. }
            | Error::ParamMismatch(_)
            | Error::InvalidHydra(_)
            | Error::BadPresentation(_)
            | Error::AngleMismatch(_) => 2,
            Error::BudgetExceeded { .. } => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
