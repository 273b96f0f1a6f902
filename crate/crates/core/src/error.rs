use alloc::string::String;

use thiserror::Error;

/// Errors raised while constructing chain-model values from text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("invalid account name {0:?}")]
    AccountName(String),
    #[error("invalid action name {0:?}")]
    ActionName(String),
    #[error("malformed amount {text:?}: {reason}")]
    Amount { text: String, reason: &'static str },
    #[error("invalid digest {0:?}: expected 64 lowercase hex characters")]
    Digest(String),
    #[error("invalid timestamp {0:?}: expected YYYY-MM-DDTHH:MM:SS.sssZ")]
    Timestamp(String),
    #[error("unknown transaction status {0:?}")]
    Status(String),
    #[error("invariant violated: {0}")]
    Invariant(&'static str),
}
