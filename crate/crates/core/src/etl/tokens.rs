//! Standard token contracts: detection from deployed interfaces, then token
//! creations and token transfers on the detected contracts.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::{String, ToString};

use serde_json::Value;

use super::{data_account, Anomaly, D5Row, D5TokenRow, D5TransferRow, SystemAccounts, TraceOutcome, EOSIO};
use crate::amount::Asset;
use crate::model::ActionTrace;
use crate::name::AccountName;
use crate::time::Timestamp;

/// Functions a contract must export to count as a standard token contract.
pub const TOKEN_INTERFACE: [&str; 3] = ["create", "issue", "transfer"];

/// Tracks the interface of the latest code deployed on every account.
///
/// The exported function list is read from the `abi` array carried in the
/// `setcode` data. Removing the code clears the interface. System accounts
/// are never reported; their currency is covered by the EOS transfer dataset.
#[derive(Debug, Clone, Default)]
pub struct TokenDetector {
    system: SystemAccounts,
    latest: BTreeMap<AccountName, bool>,
}

impl TokenDetector {
    pub fn new(system: SystemAccounts) -> Self {
        Self {
            system,
            latest: BTreeMap::new(),
        }
    }

    /// Observes one trace. Deployments without interface metadata are
    /// classified as non-token and reported.
    pub fn push(&mut self, trace: &ActionTrace) -> Result<(), Anomaly> {
        if trace.act.contract != EOSIO
            || trace.act.function != "setcode"
            || !trace.is_primary_receipt()
            || trace.error.is_some()
        {
            return Ok(());
        }
        // payload problems are reported by the contract extractor
        let (Some(account), Some(code)) = (data_account(trace, "account"), trace.act.data_str("code")) else {
            return Ok(());
        };
        if code.is_empty() {
            self.latest.insert(account, false);
            return Ok(());
        }
        match trace.act.data.get("abi").and_then(Value::as_array) {
            Some(functions) => {
                let is_token = TOKEN_INTERFACE
                    .iter()
                    .all(|f| functions.iter().any(|v| v.as_str() == Some(f)));
                self.latest.insert(account, is_token);
                Ok(())
            }
            None => {
                self.latest.insert(account, false);
                Err(Anomaly::for_trace("d5_missing_abi", trace))
            }
        }
    }

    pub fn token_contracts(&self) -> BTreeSet<AccountName> {
        self.latest
            .iter()
            .filter(|(account, is_token)| **is_token && !self.system.contains(account))
            .map(|(account, _)| account.clone())
            .collect()
    }
}

/// Token rows from `create` and transfer rows from `transfer` on detected
/// token contracts. A contract may define several symbols.
#[derive(Debug, Clone, Default)]
pub struct TokenExtractor {
    tokens: BTreeSet<AccountName>,
    created: BTreeMap<(AccountName, String), u8>,
}

impl TokenExtractor {
    pub fn new(tokens: BTreeSet<AccountName>) -> Self {
        Self {
            tokens,
            created: BTreeMap::new(),
        }
    }

    pub fn push(&mut self, trace: &ActionTrace, timestamp: Timestamp) -> TraceOutcome<D5Row> {
        let contract = &trace.act.contract;
        if !self.tokens.contains(contract) || !trace.is_primary_receipt() {
            return Ok(None);
        }
        let function = trace.act.function.as_str();
        if function != "create" && function != "transfer" {
            return Ok(None);
        }
        if trace.error.is_some() {
            return Err(Anomaly::for_trace("d5_failed_action", trace));
        }
        if function == "create" {
            self.create(trace, timestamp).map(|row| Some(D5Row::Token(row)))
        } else {
            self.transfer(trace, timestamp).map(|row| Some(D5Row::Transfer(row)))
        }
    }

    fn create(&mut self, trace: &ActionTrace, timestamp: Timestamp) -> Result<D5TokenRow, Anomaly> {
        let malformed = || Anomaly::for_trace("d5_malformed_create", trace);
        let issuer = data_account(trace, "issuer").ok_or_else(malformed)?;
        let supply = trace
            .act
            .data_str("maximum_supply")
            .and_then(|s| Asset::parse(s).ok())
            .ok_or_else(malformed)?;
        let key = (trace.act.contract.clone(), supply.symbol.clone());
        if self.created.contains_key(&key) {
            return Err(Anomaly::for_trace("d5_duplicate_token", trace));
        }
        self.created.insert(key, supply.precision);
        Ok(D5TokenRow {
            contract: trace.act.contract.clone(),
            symbol: supply.symbol,
            precision: supply.precision,
            created_at: timestamp,
            issuer,
            max_supply_units: supply.units,
        })
    }

    fn transfer(&mut self, trace: &ActionTrace, timestamp: Timestamp) -> Result<D5TransferRow, Anomaly> {
        let malformed = || Anomaly::for_trace("d5_malformed_transfer", trace);
        let from = data_account(trace, "from").ok_or_else(malformed)?;
        let to = data_account(trace, "to").ok_or_else(malformed)?;
        let quantity = trace
            .act
            .data_str("quantity")
            .and_then(|s| Asset::parse(s).ok())
            .ok_or_else(malformed)?;
        let memo = trace.act.data_str("memo").unwrap_or_default().to_string();
        match self.created.get(&(trace.act.contract.clone(), quantity.symbol.clone())) {
            None => Err(Anomaly::for_trace("d5_unknown_symbol", trace)),
            Some(&precision) if precision != quantity.precision => {
                Err(Anomaly::for_trace("d5_precision_mismatch", trace))
            }
            Some(_) => Ok(D5TransferRow {
                block_num: trace.block_num,
                timestamp,
                contract: trace.act.contract.clone(),
                symbol: quantity.symbol,
                from,
                to,
                amount_units: quantity.units,
                memo,
            }),
        }
    }
}
