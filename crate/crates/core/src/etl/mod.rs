//! Extractors mapping raw chain data onto the seven datasets.
//!
//! Every extractor is a fold: the caller feeds records in block order and gets
//! back rows. Anything that cannot be turned into a row is returned as an
//! [`Anomaly`] instead of being dropped, so every skipped record is accounted
//! for. Whether an anomaly aborts the run is the caller's decision.
//!
//! State that depends on history (first deployments, created tokens,
//! uniqueness of new accounts) is local to the range an extractor has seen.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::model::{ActionTrace, Digest};
use crate::name::AccountName;

mod blocks;
mod contracts;
mod invocations;
mod records;
mod resources;
mod accounts;
mod tokens;
mod transfers;

pub use accounts::AccountExtractor;
pub use blocks::{extract_block, unjoinable_receipt, BlockRows};
pub use contracts::{code_digest, ContractExtractor};
pub use invocations::InvocationExtractor;
pub use records::*;
pub use resources::ResourceExtractor;
pub use tokens::{TokenDetector, TokenExtractor, TOKEN_INTERFACE};
pub use transfers::TransferExtractor;

pub const EOSIO: &str = "eosio";
pub const EOSIO_TOKEN: &str = "eosio.token";

/// The seven datasets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetId {
    D1,
    D2,
    D3,
    D4,
    D5,
    D6,
    D7,
}

impl DatasetId {
    pub const ALL: [DatasetId; 7] = [
        DatasetId::D1,
        DatasetId::D2,
        DatasetId::D3,
        DatasetId::D4,
        DatasetId::D5,
        DatasetId::D6,
        DatasetId::D7,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            DatasetId::D1 => "d1",
            DatasetId::D2 => "d2",
            DatasetId::D3 => "d3",
            DatasetId::D4 => "d4",
            DatasetId::D5 => "d5",
            DatasetId::D6 => "d6",
            DatasetId::D7 => "d7",
        }
    }
}

impl core::str::FromStr for DatasetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        DatasetId::ALL
            .into_iter()
            .find(|d| d.as_str() == lower)
            .ok_or_else(|| alloc::format!("unknown dataset {s:?} (expected d1..d7)"))
    }
}

impl fmt::Display for DatasetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A record that could not be turned into a dataset row.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anomaly {
    pub reason: String,
    pub block_num: u64,
    pub tx_id: Option<Digest>,
    pub global_seq: Option<u64>,
}

impl Anomaly {
    pub fn for_trace(reason: &str, trace: &ActionTrace) -> Self {
        Anomaly {
            reason: reason.to_string(),
            block_num: trace.block_num,
            tx_id: Some(trace.tx_id.clone()),
            global_seq: Some(trace.global_seq),
        }
    }
}

impl fmt::Display for Anomaly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at block {}", self.reason, self.block_num)?;
        if let Some(tx) = &self.tx_id {
            write!(f, " tx {tx}")?;
        }
        if let Some(seq) = self.global_seq {
            write!(f, " seq {seq}")?;
        }
        Ok(())
    }
}

/// Result of feeding one trace to an extractor: `Ok(None)` when the trace is
/// not relevant to the dataset.
pub type TraceOutcome<T> = Result<Option<T>, Anomaly>;

/// Accounts whose contracts are excluded from the invocation dataset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemAccounts(BTreeSet<AccountName>);

impl SystemAccounts {
    pub const DEFAULT: [&'static str; 5] =
        ["eosio", "eosio.token", "eosio.msig", "eosio.ram", "eosio.ramfee"];

    pub fn with_extras(extras: impl IntoIterator<Item = AccountName>) -> Self {
        let mut set = Self::default();
        set.0.extend(extras);
        set
    }

    /// Replaces the default set entirely.
    pub fn exactly(accounts: impl IntoIterator<Item = AccountName>) -> Self {
        SystemAccounts(accounts.into_iter().collect())
    }

    pub fn contains(&self, account: &AccountName) -> bool {
        self.0.contains(account)
    }

    pub fn iter(&self) -> impl Iterator<Item = &AccountName> {
        self.0.iter()
    }
}

impl Default for SystemAccounts {
    fn default() -> Self {
        SystemAccounts(
            Self::DEFAULT
                .iter()
                .map(|s| AccountName::new(*s).expect("valid system account"))
                .collect(),
        )
    }
}

/// Selects the primary receipt of a successful action on `contract::function`.
/// Failed actions are reported rather than silently skipped.
pub(crate) fn select_trace<'a>(
    trace: &'a ActionTrace,
    contract: &str,
    function: &str,
    failed_reason: &str,
) -> Result<bool, Anomaly> {
    if trace.act.contract != contract || trace.act.function != function || !trace.is_primary_receipt() {
        return Ok(false);
    }
    if trace.error.is_some() {
        return Err(Anomaly::for_trace(failed_reason, trace));
    }
    Ok(true)
}

pub(crate) fn data_account(trace: &ActionTrace, key: &str) -> Option<AccountName> {
    trace.act.data_str(key).and_then(|s| AccountName::new(s).ok())
}
