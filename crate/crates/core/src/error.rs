use thiserror::Error;

/// Errors surfaced by the library. The CLI maps the variant families onto
/// exit codes (2 config, 3 resource cap, 4 invariant).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("resource cap exceeded: {0}")]
    Cap(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("overlapping projection: {} triangle(s) covered more than once", .0.len())]
    Overlap(Vec<String>),
    #[error("numerical failure: {0}")]
    Numeric(String),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
