use alloc::string::String;

use super::{D4Record, SystemAccounts, TraceOutcome};
use crate::model::ActionTrace;
use crate::time::Timestamp;

/// Contract invocations: one row per top-level action on a non-system
/// contract. Inline calls are not counted as invocations.
#[derive(Debug, Clone, Default)]
pub struct InvocationExtractor {
    system: SystemAccounts,
}

impl InvocationExtractor {
    pub fn new(system: SystemAccounts) -> Self {
        Self { system }
    }

    pub fn push(&mut self, trace: &ActionTrace, timestamp: Timestamp) -> TraceOutcome<D4Record> {
        if trace.is_inline() || !trace.is_primary_receipt() || self.system.contains(&trace.act.contract) {
            return Ok(None);
        }
        Ok(Some(D4Record {
            block_num: trace.block_num,
            timestamp,
            tx_id: trace.tx_id.clone(),
            authorizer: trace.act.first_authorizer().cloned(),
            contract: trace.act.contract.clone(),
            function: trace.act.function.clone(),
            has_error: trace.error.is_some(),
            error_text: trace.error.clone().unwrap_or_else(String::new),
        }))
    }
}
