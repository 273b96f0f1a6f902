use alloc::vec::Vec;

use super::{Anomaly, D1ActionRow, D1BlockRow, D1TransactionRow};
use crate::model::{RawBlock, TransactionReceipt};

/// Rows produced from one block.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BlockRows {
    pub block: Option<D1BlockRow>,
    pub transactions: Vec<D1TransactionRow>,
    pub actions: Vec<D1ActionRow>,
    pub anomalies: Vec<Anomaly>,
}

/// Flattens a block into block, transaction and action rows.
///
/// `receipts` are the receipts recorded for this block; they fill in usage
/// when the block does not embed it. A transaction with neither gets zero
/// usage and a `d1_receipt_missing` anomaly. Receipts matching no transaction
/// of the block are reported as `d1_unjoinable_receipt`.
///
/// Block actions are the packaged (calling and deferred) actions only; inline
/// actions never appear in a block, so they never reach the action rows.
pub fn extract_block(block: &RawBlock, receipts: &[TransactionReceipt]) -> BlockRows {
    let mut out = BlockRows {
        block: Some(D1BlockRow {
            block_num: block.block_num,
            block_id: block.block_id.clone(),
            timestamp: block.timestamp,
            producer: block.producer.clone(),
            tx_count: block.transactions.len() as u64,
        }),
        transactions: Vec::with_capacity(block.transactions.len()),
        actions: Vec::new(),
        anomalies: Vec::new(),
    };
    let mut joined = alloc::vec![false; receipts.len()];

    for tx in &block.transactions {
        let receipt = receipts
            .iter()
            .enumerate()
            .find(|(i, r)| !joined[*i] && r.tx_id == tx.tx_id && r.block_num == block.block_num);
        if let Some((i, _)) = receipt {
            joined[i] = true;
        }
        let receipt = receipt.map(|(_, r)| r);

        let (cpu, net) = match (tx.cpu_usage_us, tx.net_usage_words, receipt) {
            (Some(cpu), Some(net), _) => (cpu, net),
            (cpu, net, Some(r)) => (cpu.unwrap_or(r.cpu_usage_us), net.unwrap_or(r.net_usage_words)),
            (cpu, net, None) => {
                out.anomalies.push(Anomaly {
                    reason: "d1_receipt_missing".into(),
                    block_num: block.block_num,
                    tx_id: Some(tx.tx_id.clone()),
                    global_seq: None,
                });
                (cpu.unwrap_or(0), net.unwrap_or(0))
            }
        };

        out.transactions.push(D1TransactionRow {
            tx_id: tx.tx_id.clone(),
            block_num: block.block_num,
            is_deferred: tx.is_deferred,
            status: tx.status,
            cpu_usage_us: cpu,
            net_usage_words: net,
        });
        out.actions.extend(tx.actions.iter().enumerate().map(|(i, act)| D1ActionRow {
            tx_id: tx.tx_id.clone(),
            action_index: i as u32,
            contract: act.contract.clone(),
            function: act.function.clone(),
            authorizers: act.joined_authorizers(),
            data: act.canonical_data(),
        }));
    }

    out.anomalies.extend(
        receipts
            .iter()
            .zip(&joined)
            .filter(|(_, joined)| !**joined)
            .map(|(r, _)| unjoinable_receipt(r)),
    );
    out
}

/// Anomaly for a receipt that matches no packaged transaction.
pub fn unjoinable_receipt(receipt: &TransactionReceipt) -> Anomaly {
    Anomaly {
        reason: "d1_unjoinable_receipt".into(),
        block_num: receipt.block_num,
        tx_id: Some(receipt.tx_id.clone()),
        global_seq: None,
    }
}
