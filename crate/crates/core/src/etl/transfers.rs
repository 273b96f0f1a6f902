use alloc::string::ToString;

use super::{data_account, select_trace, Anomaly, D2Record, TraceOutcome, TransferKind, EOSIO_TOKEN};
use crate::amount::parse_eos_amount;
use crate::model::ActionTrace;
use crate::time::Timestamp;

/// EOS transfers from `eosio.token::transfer` traces.
///
/// Only the trace executed by `eosio.token` itself is used; the notification
/// copies delivered to sender and recipient would count each transfer three
/// times. A transfer is internal when it was triggered by another action.
#[derive(Debug, Clone, Default)]
pub struct TransferExtractor;

impl TransferExtractor {
    pub fn push(&mut self, trace: &ActionTrace, timestamp: Timestamp) -> TraceOutcome<D2Record> {
        if !select_trace(trace, EOSIO_TOKEN, "transfer", "d2_failed_action")? {
            return Ok(None);
        }
        let malformed = || Anomaly::for_trace("d2_malformed_transfer", trace);
        let from = data_account(trace, "from").ok_or_else(malformed)?;
        let to = data_account(trace, "to").ok_or_else(malformed)?;
        let amount = trace
            .act
            .data_str("quantity")
            .ok_or_else(malformed)
            .and_then(|q| parse_eos_amount(q).map_err(|_| malformed()))?;
        let memo = match trace.act.data.get("memo") {
            None => Default::default(),
            Some(v) => v.as_str().ok_or_else(malformed)?.to_string(),
        };
        Ok(Some(D2Record {
            block_num: trace.block_num,
            timestamp,
            tx_id: trace.tx_id.clone(),
            from,
            to,
            amount,
            memo,
            kind: if trace.is_inline() {
                TransferKind::Internal
            } else {
                TransferKind::External
            },
        }))
    }
}
