use alloc::collections::BTreeSet;
use alloc::string::String;

use sha2::{Digest as _, Sha256};

use super::{data_account, select_trace, Anomaly, CodeAction, D3Record, TraceOutcome, EOSIO};
use crate::model::ActionTrace;
use crate::name::AccountName;
use crate::time::Timestamp;

/// SHA-256 of the code bytes as lowercase hex.
pub fn code_digest(code: &[u8]) -> String {
    hex::encode(Sha256::digest(code))
}

/// Contract deployments from `eosio::setcode`. Setting the code to an empty
/// payload is reported as `setemptycode`.
#[derive(Debug, Clone, Default)]
pub struct ContractExtractor {
    deployed: BTreeSet<AccountName>,
}

impl ContractExtractor {
    pub fn push(&mut self, trace: &ActionTrace, timestamp: Timestamp) -> TraceOutcome<D3Record> {
        if !select_trace(trace, EOSIO, "setcode", "d3_failed_action")? {
            return Ok(None);
        }
        let account = data_account(trace, "account")
            .ok_or_else(|| Anomaly::for_trace("d3_missing_account", trace))?;
        let code_hex = trace
            .act
            .data_str("code")
            .ok_or_else(|| Anomaly::for_trace("d3_missing_code", trace))?;
        let code = hex::decode(code_hex).map_err(|_| Anomaly::for_trace("d3_invalid_code_hex", trace))?;

        let (action_kind, code_hash, is_first_deploy) = if code.is_empty() {
            (CodeAction::SetEmptyCode, String::new(), false)
        } else {
            let first = self.deployed.insert(account.clone());
            (CodeAction::SetCode, code_digest(&code), first)
        };
        Ok(Some(D3Record {
            account,
            block_num: trace.block_num,
            timestamp,
            action_kind,
            code_hash,
            code_size_bytes: code_hex.len() as u64,
            is_first_deploy,
        }))
    }
}
