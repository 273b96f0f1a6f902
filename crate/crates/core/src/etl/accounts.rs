use alloc::collections::BTreeSet;

use super::{select_trace, Anomaly, D6Record, TraceOutcome, EOSIO};
use crate::model::ActionTrace;
use crate::name::AccountName;
use crate::time::Timestamp;

/// Account creations from `eosio::newaccount`. The creator is the first
/// authorizer; the new name comes from the `name` parameter.
#[derive(Debug, Clone, Default)]
pub struct AccountExtractor {
    created: BTreeSet<AccountName>,
}

impl AccountExtractor {
    pub fn push(&mut self, trace: &ActionTrace, timestamp: Timestamp) -> TraceOutcome<D6Record> {
        if !select_trace(trace, EOSIO, "newaccount", "d6_failed_action")? {
            return Ok(None);
        }
        let creator = trace
            .act
            .first_authorizer()
            .cloned()
            .ok_or_else(|| Anomaly::for_trace("d6_missing_creator", trace))?;
        let new_account = trace
            .act
            .data_str("name")
            .and_then(|s| AccountName::new(s).ok())
            .ok_or_else(|| Anomaly::for_trace("d6_invalid_account_name", trace))?;
        if !self.created.insert(new_account.clone()) {
            return Err(Anomaly::for_trace("d6_duplicate_account", trace));
        }
        Ok(Some(D6Record {
            block_num: trace.block_num,
            timestamp,
            creator,
            new_account,
        }))
    }
}
