//! Chain model, dataset extractors and mergeable statistics for EOSIO-style
//! chain data.
//!
//! This crate is `no_std` (it needs `alloc`). Everything that touches the
//! filesystem, threads or clocks lives in the `xeos` companion crate; the
//! types here are plain values and the extractors are folds that push rows
//! into caller-provided sinks.

#![no_std]

extern crate alloc;

pub mod amount;
pub mod error;
pub mod etl;
pub mod model;
pub mod name;
pub mod stats;
pub mod time;

pub use amount::{parse_eos_amount, Asset, EosAmount};
pub use error::ModelError;
pub use model::{
    ActionTrace, Authorization, Digest, RawAction, RawBlock, RawTransaction, TransactionReceipt,
    TxStatus,
};
pub use name::{validate_account_name, AccountName, ActionName};
pub use time::Timestamp;
