//! Row types of the seven datasets. Field order is the CSV column order.

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::amount::EosAmount;
use crate::model::{Digest, TxStatus};
use crate::name::{AccountName, ActionName};
use crate::time::Timestamp;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D1BlockRow {
    pub block_num: u64,
    pub block_id: Digest,
    pub timestamp: Timestamp,
    pub producer: AccountName,
    pub tx_count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D1TransactionRow {
    pub tx_id: Digest,
    pub block_num: u64,
    pub is_deferred: bool,
    pub status: TxStatus,
    pub cpu_usage_us: u64,
    pub net_usage_words: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D1ActionRow {
    pub tx_id: Digest,
    pub action_index: u32,
    pub contract: AccountName,
    pub function: ActionName,
    /// `actor@permission` pairs joined with `;`.
    pub authorizers: String,
    /// Decoded parameters as compact JSON with sorted keys.
    pub data: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TransferKind {
    /// Triggered by another action (an inline action).
    Internal,
    /// A top-level action packaged in a transaction.
    External,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D2Record {
    pub block_num: u64,
    pub timestamp: Timestamp,
    pub tx_id: Digest,
    pub from: AccountName,
    pub to: AccountName,
    pub amount: EosAmount,
    pub memo: String,
    pub kind: TransferKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeAction {
    SetCode,
    SetEmptyCode,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D3Record {
    pub account: AccountName,
    pub block_num: u64,
    pub timestamp: Timestamp,
    pub action_kind: CodeAction,
    /// SHA-256 of the code bytes; empty for [`CodeAction::SetEmptyCode`].
    pub code_hash: String,
    /// Length of the hex-encoded code, i.e. twice the byte length.
    pub code_size_bytes: u64,
    pub is_first_deploy: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D4Record {
    pub block_num: u64,
    pub timestamp: Timestamp,
    pub tx_id: Digest,
    pub authorizer: Option<AccountName>,
    pub contract: AccountName,
    pub function: ActionName,
    pub has_error: bool,
    pub error_text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D5TokenRow {
    pub contract: AccountName,
    pub symbol: String,
    pub precision: u8,
    pub created_at: Timestamp,
    pub issuer: AccountName,
    pub max_supply_units: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D5TransferRow {
    pub block_num: u64,
    pub timestamp: Timestamp,
    pub contract: AccountName,
    pub symbol: String,
    pub from: AccountName,
    pub to: AccountName,
    pub amount_units: i64,
    pub memo: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum D5Row {
    Token(D5TokenRow),
    Transfer(D5TransferRow),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D6Record {
    pub block_num: u64,
    pub timestamp: Timestamp,
    pub creator: AccountName,
    pub new_account: AccountName,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ResourceCategory {
    #[serde(rename = "CPU")]
    Cpu,
    #[serde(rename = "NET")]
    Net,
    #[serde(rename = "RAM")]
    Ram,
    #[serde(rename = "REX")]
    Rex,
}

impl ResourceCategory {
    pub const ALL: [ResourceCategory; 4] = [
        ResourceCategory::Cpu,
        ResourceCategory::Net,
        ResourceCategory::Ram,
        ResourceCategory::Rex,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResourceCategory::Cpu => "CPU",
            ResourceCategory::Net => "NET",
            ResourceCategory::Ram => "RAM",
            ResourceCategory::Rex => "REX",
        }
    }
}

impl fmt::Display for ResourceCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResourceAction {
    StakeCpu,
    UnstakeCpu,
    StakeNet,
    UnstakeNet,
    BuyRam,
    SellRam,
    BuyRex,
    SellRex,
    RentCpu,
    RentNet,
}

impl ResourceAction {
    pub const ALL: [ResourceAction; 10] = [
        ResourceAction::StakeCpu,
        ResourceAction::UnstakeCpu,
        ResourceAction::StakeNet,
        ResourceAction::UnstakeNet,
        ResourceAction::BuyRam,
        ResourceAction::SellRam,
        ResourceAction::BuyRex,
        ResourceAction::SellRex,
        ResourceAction::RentCpu,
        ResourceAction::RentNet,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ResourceAction::StakeCpu => "stakecpu",
            ResourceAction::UnstakeCpu => "unstakecpu",
            ResourceAction::StakeNet => "stakenet",
            ResourceAction::UnstakeNet => "unstakenet",
            ResourceAction::BuyRam => "buyram",
            ResourceAction::SellRam => "sellram",
            ResourceAction::BuyRex => "buyrex",
            ResourceAction::SellRex => "sellrex",
            ResourceAction::RentCpu => "rentcpu",
            ResourceAction::RentNet => "rentnet",
        }
    }

    pub fn from_function(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|a| a.as_str() == name)
    }

    /// Fixed category membership; renting CPU or NET goes through REX.
    pub fn category(self) -> ResourceCategory {
        use ResourceAction::*;
        match self {
            StakeCpu | UnstakeCpu => ResourceCategory::Cpu,
            StakeNet | UnstakeNet => ResourceCategory::Net,
            BuyRam | SellRam => ResourceCategory::Ram,
            BuyRex | SellRex | RentCpu | RentNet => ResourceCategory::Rex,
        }
    }
}

impl fmt::Display for ResourceAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct D7Record {
    pub block_num: u64,
    pub timestamp: Timestamp,
    pub actor: AccountName,
    pub category: ResourceCategory,
    pub action: ResourceAction,
    pub eos_amount: EosAmount,
}
