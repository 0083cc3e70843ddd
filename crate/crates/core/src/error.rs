//! Error type shared by all modules.

use thiserror::Error;

/// Failures that indicate misuse of an operation rather than a mathematical verdict.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    /// A length, arity or degree requirement failed.
    #[error("shape mismatch: {0}")]
    Shape(String),
    /// An input violated a documented precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),
    /// Text input could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
}

/// Result alias used across the crate.
pub type Result<T> = std::result::Result<T, Error>;
