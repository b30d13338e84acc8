//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An input violates an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configured effort bound was exceeded; the message names what was
    /// left undone (e.g. the unfactored cofactor).
    #[error("resource limit: {0}")]
    ResourceLimit(String),

    /// An internal invariant failed. This signals a bug or a falsified
    /// theorem, never bad user input.
    #[error("invariant violation: {0}")]
    Invariant(String),

    /// The class-number cache file is malformed or self-contradictory.
    #[error("cache error: {0}")]
    Cache(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
