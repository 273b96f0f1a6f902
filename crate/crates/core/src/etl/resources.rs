use super::{Anomaly, D7Record, ResourceAction, TraceOutcome, EOSIO};
use crate::amount::parse_eos_amount;
use crate::model::ActionTrace;
use crate::time::Timestamp;

/// CPU, NET, RAM and REX actions on `eosio`. The actor is the first
/// authorizer and the EOS amount comes from the `quantity` parameter. System
/// actions outside the ten resource actions are ignored.
#[derive(Debug, Clone, Default)]
pub struct ResourceExtractor;

impl ResourceExtractor {
    pub fn push(&mut self, trace: &ActionTrace, timestamp: Timestamp) -> TraceOutcome<D7Record> {
        if trace.act.contract != EOSIO || !trace.is_primary_receipt() {
            return Ok(None);
        }
        let Some(action) = ResourceAction::from_function(trace.act.function.as_str()) else {
            return Ok(None);
        };
        if trace.error.is_some() {
            return Err(Anomaly::for_trace("d7_failed_action", trace));
        }
        let malformed = || Anomaly::for_trace("d7_malformed_resource_action", trace);
        let actor = trace.act.first_authorizer().cloned().ok_or_else(malformed)?;
        let eos_amount = trace
            .act
            .data_str("quantity")
            .and_then(|q| parse_eos_amount(q).ok())
            .ok_or_else(malformed)?;
        Ok(Some(D7Record {
            block_num: trace.block_num,
            timestamp,
            actor,
            category: action.category(),
            action,
            eos_amount,
        }))
    }
}
