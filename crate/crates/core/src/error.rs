use std::io;

use thiserror::Error;

use crate::decompose::Violation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),

    #[error("invalid l33t table at line {line}: {reason}")]
    L33tTable { line: usize, reason: String },

    #[error("corpus contained no usable passwords ({skipped} lines skipped)")]
    EmptyCorpus { skipped: u64 },

    #[error("model format error at line {line}: {reason}")]
    ModelFormat { line: usize, reason: String },

    #[error("model was trained with l33t table {expected}, got table {actual}")]
    L33tMismatch { expected: String, actual: String },

    #[error("password parts violate an invariant: {0}")]
    InvalidParts(String),

    #[error("prefix/suffix must contain only digits and symbols")]
    LetterInAffix,

    #[error("password violates policy: {}", .0.iter().map(|v| v.as_str()).collect::<Vec<_>>().join(", "))]
    Policy(Vec<Violation>),

    #[error("enumeration of {0} combinations exceeds the brute-force limit")]
    TooManyCombinations(u128),

    #[error("need at least {needed} policy-valid sample passwords, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}
