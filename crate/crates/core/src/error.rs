use thiserror::Error;

use crate::models::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),

    #[error("unknown state `{0}`")]
    UnknownState(String),

    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),

    #[error("empty word: trace probabilities are defined on nonempty words only")]
    EmptyWord,

    #[error("invalid model:\n{0}")]
    InvalidModel(ValidationReport),

    #[error("enumeration cap exceeded: {words} words requested, cap is {cap}")]
    CapExceeded { words: u128, cap: u128 },

    #[error("path does not start at `{expected}` (starts at `{found}`)")]
    PathStart { expected: String, found: String },

    #[error("empty path")]
    EmptyPath,

    #[error("the bad-prefix automaton accepts the empty word, so the property is empty")]
    EmptyProperty,

    #[error("malformed model document: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn dim(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
