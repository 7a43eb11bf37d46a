//! Error types shared across the crate.

/// Errors produced by the library, grouped by how callers should react:
/// malformed input bytes, invalid data, invalid configuration, or a
/// degenerate numerical condition. The CLI maps these groups onto its
/// exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input bytes could not be parsed. `line` is 1-based and counts the
    /// header line for CSV input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Data violates an invariant (negative loss, duplicate id, missing
    /// category, single-label training set, ...).
    #[error("invalid data: {0}")]
    InvalidData(String),

    /// A configuration value is out of range or inconsistent.
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    /// A numerical procedure degenerated (zero variance, every grid value
    /// unusable, overflow).
    #[error("degenerate numerical condition: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
