use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid bound: {0}")]
    InvalidBound(String),

    #[error("mismatched endpoints: {0}")]
    Mismatch(String),

    #[error("object count {count} exceeds the safety ceiling {ceiling} (set OPCHECK_CEILING to override)")]
    Ceiling { count: usize, ceiling: usize },

    #[error("malformed table: {0}")]
    MalformedTable(String),

    #[error("malformed category: {0}")]
    MalformedCategory(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
