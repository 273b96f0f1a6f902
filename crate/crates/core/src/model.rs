//! Raw chain records as a node emits them: blocks with their packaged
//! transactions, flattened action traces, and transaction receipts.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::ModelError;
use crate::name::{AccountName, ActionName};
use crate::time::Timestamp;

/// A 32-byte digest as 64 lowercase hex characters (block ids, tx ids).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Digest(String);

impl Digest {
    pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
        let value = value.into();
        if value.len() == 64 && value.bytes().all(|b| matches!(b, b'0'..=b'9' | b'a'..=b'f')) {
            Ok(Self(value))
        } else {
            Err(ModelError::Digest(value))
        }
    }

    pub fn from_bytes(bytes: &[u8; 32]) -> Self {
        Self(hex::encode(bytes))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Digest {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Digest> for String {
    fn from(d: Digest) -> String {
        d.0
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TxStatus {
    Executed,
    SoftFail,
    HardFail,
    Delayed,
    Expired,
}

impl TxStatus {
    pub const ALL: [TxStatus; 5] = [
        TxStatus::Executed,
        TxStatus::SoftFail,
        TxStatus::HardFail,
        TxStatus::Delayed,
        TxStatus::Expired,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TxStatus::Executed => "executed",
            TxStatus::SoftFail => "soft_fail",
            TxStatus::HardFail => "hard_fail",
            TxStatus::Delayed => "delayed",
            TxStatus::Expired => "expired",
        }
    }
}

impl core::str::FromStr for TxStatus {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TxStatus::ALL
            .into_iter()
            .find(|status| status.as_str() == s)
            .ok_or_else(|| ModelError::Status(s.to_string()))
    }
}

impl fmt::Display for TxStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Authorization {
    pub actor: AccountName,
    pub permission: String,
}

impl fmt::Display for Authorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.actor, self.permission)
    }
}

/// One action as packaged in a transaction or recorded in a trace.
///
/// `data` holds the decoded parameters; `hex_data` the raw payload, which may
/// be empty when only the decoded form is available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawAction {
    pub contract: AccountName,
    pub function: ActionName,
    pub authorizers: Vec<Authorization>,
    pub data: Map<String, Value>,
    pub hex_data: String,
}

impl RawAction {
    pub fn first_authorizer(&self) -> Option<&AccountName> {
        self.authorizers.first().map(|a| &a.actor)
    }

    /// Authorizers joined as `actor@permission;actor@permission`.
    pub fn joined_authorizers(&self) -> String {
        let mut out = String::new();
        for (i, auth) in self.authorizers.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            out.push_str(auth.actor.as_str());
            out.push('@');
            out.push_str(&auth.permission);
        }
        out
    }

    /// Decoded parameters as compact JSON with sorted keys.
    pub fn canonical_data(&self) -> String {
        // serde_json's Map is ordered by key without the preserve_order feature
        serde_json::to_string(&self.data).unwrap_or_default()
    }

    pub fn data_str(&self, key: &str) -> Option<&str> {
        self.data.get(key).and_then(Value::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawTransaction {
    pub tx_id: Digest,
    pub status: TxStatus,
    pub is_deferred: bool,
    /// `None` when the block does not embed usage; the receipt carries it.
    #[serde(default)]
    pub cpu_usage_us: Option<u64>,
    #[serde(default)]
    pub net_usage_words: Option<u64>,
    pub actions: Vec<RawAction>,
}

impl RawTransaction {
    pub fn net_usage_bytes(&self) -> Option<u64> {
        self.net_usage_words.map(|w| w * 8)
    }

    pub fn check(&self) -> Result<(), ModelError> {
        if self.status == TxStatus::Executed && self.actions.is_empty() {
            return Err(ModelError::Invariant("executed transaction without actions"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RawBlock {
    pub block_num: u64,
    pub block_id: Digest,
    pub timestamp: Timestamp,
    pub producer: AccountName,
    pub transactions: Vec<RawTransaction>,
}

impl RawBlock {
    pub fn check(&self) -> Result<(), ModelError> {
        if self.block_num == 0 {
            return Err(ModelError::Invariant("block_num must be at least 1"));
        }
        self.transactions.iter().try_for_each(RawTransaction::check)
    }
}

/// The run-time record of one executed action. Traces are stored flat; an
/// inline action points at the trace that triggered it through `parent_seq`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActionTrace {
    pub global_seq: u64,
    pub tx_id: Digest,
    pub block_num: u64,
    pub parent_seq: Option<u64>,
    pub receiver: AccountName,
    #[serde(flatten)]
    pub act: RawAction,
    pub error: Option<String>,
    pub console: Option<String>,
}

impl ActionTrace {
    pub fn is_inline(&self) -> bool {
        self.parent_seq.is_some()
    }

    /// True for the copy of the trace executed by the contract itself, as
    /// opposed to notification copies delivered to other receivers.
    pub fn is_primary_receipt(&self) -> bool {
        self.receiver == self.act.contract
    }

    pub fn check(&self) -> Result<(), ModelError> {
        match self.parent_seq {
            Some(parent) if parent >= self.global_seq => {
                Err(ModelError::Invariant("parent_seq must precede global_seq"))
            }
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransactionReceipt {
    pub tx_id: Digest,
    pub block_num: u64,
    pub status: TxStatus,
    pub cpu_usage_us: u64,
    pub net_usage_words: u64,
}

/// Checks that the traces of one transaction form a forest: every parent is
/// present, belongs to the same transaction and precedes its child.
pub fn check_trace_forest<'a>(traces: impl IntoIterator<Item = &'a ActionTrace>) -> Result<(), ModelError> {
    let mut seen = alloc::collections::BTreeMap::<u64, &Digest>::new();
    for trace in traces {
        trace.check()?;
        if let Some(parent) = trace.parent_seq {
            match seen.get(&parent) {
                Some(tx) if **tx == trace.tx_id => {}
                Some(_) => return Err(ModelError::Invariant("parent trace in another transaction")),
                None => return Err(ModelError::Invariant("unresolvable parent_seq")),
            }
        }
        if seen.insert(trace.global_seq, &trace.tx_id).is_some() {
            return Err(ModelError::Invariant("duplicate global_seq"));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn digest(c: char) -> Digest {
        Digest::new(core::iter::repeat(c).take(64).collect::<String>()).unwrap()
    }

    fn trace(seq: u64, parent: Option<u64>) -> ActionTrace {
        ActionTrace {
            global_seq: seq,
            tx_id: digest('a'),
            block_num: 1,
            parent_seq: parent,
            receiver: AccountName::new("eosio.token").unwrap(),
            act: RawAction {
                contract: AccountName::new("eosio.token").unwrap(),
                function: ActionName::new("transfer").unwrap(),
                authorizers: vec![Authorization {
                    actor: AccountName::new("alice").unwrap(),
                    permission: "active".into(),
                }],
                data: Map::new(),
                hex_data: String::new(),
            },
            error: None,
            console: None,
        }
    }

    #[test]
    fn trace_field_order_is_stable() {
        let json = serde_json::to_string(&trace(7, Some(3))).unwrap();
        assert_eq!(
            json,
            concat!(
                r#"{"global_seq":7,"tx_id":"aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaa","#,
                r#""block_num":1,"parent_seq":3,"receiver":"eosio.token","contract":"eosio.token","#,
                r#""function":"transfer","authorizers":[{"actor":"alice","permission":"active"}],"#,
                r#""data":{},"hex_data":"","error":null,"console":null}"#
            )
        );
        let back: ActionTrace = serde_json::from_str(&json).unwrap();
        assert_eq!(back, trace(7, Some(3)));
        assert!(back.is_inline());
    }

    #[test]
    fn status_rejects_unknown() {
        assert!(serde_json::from_str::<TxStatus>("\"soft_fail\"").is_ok());
        assert!(serde_json::from_str::<TxStatus>("\"failed\"").is_err());
        assert_eq!("hard_fail".parse::<TxStatus>().unwrap(), TxStatus::HardFail);
    }

    #[test]
    fn digest_grammar() {
        assert!(Digest::new("ab").is_err());
        assert!(Digest::new("A".repeat(64)).is_err());
        assert!(Digest::new("0f".repeat(32)).is_ok());
    }

    #[test]
    fn forest_checks() {
        let ok = [trace(1, None), trace(2, Some(1)), trace(3, Some(2)), trace(4, None)];
        assert!(check_trace_forest(&ok).is_ok());
        let dangling = [trace(1, None), trace(3, Some(2))];
        assert!(check_trace_forest(&dangling).is_err());
        let backwards = [trace(2, Some(5))];
        assert!(check_trace_forest(&backwards).is_err());
        let mut other_tx = trace(2, Some(1));
        other_tx.tx_id = digest('b');
        assert!(check_trace_forest(&[trace(1, None), other_tx]).is_err());
    }

    #[test]
    fn missing_usage_reads_as_none() {
        let json = r#"{"tx_id":"0000000000000000000000000000000000000000000000000000000000000000","status":"executed","is_deferred":false,"actions":[]}"#;
        let tx: RawTransaction = serde_json::from_str(json).unwrap();
        assert_eq!(tx.cpu_usage_us, None);
        assert!(tx.check().is_err());
    }
}
