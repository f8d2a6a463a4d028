//! Error type for the neural-network stack.

use thiserror::Error;

/// Errors produced by tensors, layers, models and training.
#[derive(Debug, Error)]
pub enum Error {
    /// Tensor dimensions do not line up for the requested operation.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// A caller-supplied argument violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Training produced a non-finite loss.
    #[error("training diverged: {0}")]
    Divergence(String),

    /// A dataset violates a property the consumer relies on.
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    /// An enumeration or sampling budget would be exceeded.
    #[error("resource budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error(transparent)]
    Core(#[from] recon_core::Error),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
