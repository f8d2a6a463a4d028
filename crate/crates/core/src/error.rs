//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by graph construction, deck machinery and generators.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The input is structurally valid but larger than the supported size cap.
    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    /// An enumeration or sampling budget would be exceeded.
    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),

    /// A deck fails an internal consistency check (e.g. a divisibility
    /// identity that every genuine deck satisfies).
    #[error("corrupted deck: {0}")]
    CorruptedDeck(String),

    /// A dataset violates a property the consumer relies on.
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    /// A generator could not produce a graph within its retry budget.
    #[error("generation failed: {0}")]
    Generation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
