//! Dataset summary tables.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{ratio, tps, Accumulator, FunctionCounts, Merge, RankedFunction};
use crate::etl::{
    CodeAction, D1ActionRow, D1BlockRow, D1TransactionRow, D2Record, D3Record, D4Record, D5TokenRow, D5TransferRow,
    D6Record, D7Record, ResourceAction, ResourceCategory, TransferKind,
};
use crate::name::AccountName;

fn merge_max<T: Ord>(a: &mut Option<T>, b: Option<T>) {
    if let Some(b) = b {
        match a {
            Some(a) if *a >= b => {}
            _ => *a = Some(b),
        }
    }
}

// ---------------------------------------------------------------- D1

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct D1Summary {
    pub blocks: u64,
    pub transactions: u64,
    pub deferred: u64,
    pub actions: u64,
    pub cpu_us: u128,
    pub net_words: u128,
    pub producers: BTreeSet<AccountName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D1Table {
    pub blocks: u64,
    pub transactions: u64,
    pub deferred_transactions: u64,
    pub actions: u64,
    pub producers: u64,
    pub mean_tx_per_block: f64,
    pub tps: f64,
    pub mean_cpu_us_per_block: f64,
    pub mean_net_words_per_block: f64,
}

impl D1Summary {
    pub fn table(&self) -> D1Table {
        let blocks = u128::from(self.blocks);
        let mean_tx = ratio(u128::from(self.transactions), blocks);
        D1Table {
            blocks: self.blocks,
            transactions: self.transactions,
            deferred_transactions: self.deferred,
            actions: self.actions,
            producers: self.producers.len() as u64,
            mean_tx_per_block: mean_tx,
            tps: tps(mean_tx),
            mean_cpu_us_per_block: ratio(self.cpu_us, blocks),
            mean_net_words_per_block: ratio(self.net_words, blocks),
        }
    }
}

impl Merge for D1Summary {
    fn merge(&mut self, other: Self) {
        self.blocks += other.blocks;
        self.transactions += other.transactions;
        self.deferred += other.deferred;
        self.actions += other.actions;
        self.cpu_us += other.cpu_us;
        self.net_words += other.net_words;
        self.producers.extend(other.producers);
    }
}

impl Accumulator<D1BlockRow> for D1Summary {
    fn push(&mut self, row: &D1BlockRow) {
        self.blocks += 1;
        if !self.producers.contains(&row.producer) {
            self.producers.insert(row.producer.clone());
        }
    }
}

impl Accumulator<D1TransactionRow> for D1Summary {
    fn push(&mut self, row: &D1TransactionRow) {
        self.transactions += 1;
        self.deferred += u64::from(row.is_deferred);
        self.cpu_us += u128::from(row.cpu_usage_us);
        self.net_words += u128::from(row.net_usage_words);
    }
}

impl Accumulator<D1ActionRow> for D1Summary {
    fn push(&mut self, _row: &D1ActionRow) {
        self.actions += 1;
    }
}

// ---------------------------------------------------------------- D2

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct D2Summary {
    pub internal: u64,
    pub external: u64,
    pub total_units: u128,
    pub max_units: Option<i64>,
    pub accounts: BTreeSet<AccountName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D2Table {
    pub internal_transfers: u64,
    pub external_transfers: u64,
    pub accounts: u64,
    pub total_amount_units: u128,
    pub mean_amount_units: f64,
    pub max_amount_units: i64,
}

impl D2Summary {
    pub fn table(&self) -> D2Table {
        D2Table {
            internal_transfers: self.internal,
            external_transfers: self.external,
            accounts: self.accounts.len() as u64,
            total_amount_units: self.total_units,
            mean_amount_units: ratio(self.total_units, u128::from(self.internal + self.external)),
            max_amount_units: self.max_units.unwrap_or(0),
        }
    }
}

impl Merge for D2Summary {
    fn merge(&mut self, other: Self) {
        self.internal += other.internal;
        self.external += other.external;
        self.total_units += other.total_units;
        merge_max(&mut self.max_units, other.max_units);
        self.accounts.extend(other.accounts);
    }
}

impl Accumulator<D2Record> for D2Summary {
    fn push(&mut self, rec: &D2Record) {
        match rec.kind {
            TransferKind::Internal => self.internal += 1,
            TransferKind::External => self.external += 1,
        }
        let units = rec.amount.units();
        self.total_units += units.max(0) as u128;
        merge_max(&mut self.max_units, Some(units));
        for account in [&rec.from, &rec.to] {
            if !self.accounts.contains(account) {
                self.accounts.insert(account.clone());
            }
        }
    }
}

// ---------------------------------------------------------------- D3

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct D3Summary {
    pub setcode: u64,
    pub setemptycode: u64,
    pub first_deploys: u64,
    pub hex_size_total: u128,
    pub contracts: BTreeSet<AccountName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D3Table {
    pub contracts: u64,
    pub setcode_actions: u64,
    pub setemptycode_actions: u64,
    pub first_deploys: u64,
    pub mean_hex_code_size: f64,
}

impl D3Summary {
    pub fn table(&self) -> D3Table {
        D3Table {
            contracts: self.contracts.len() as u64,
            setcode_actions: self.setcode,
            setemptycode_actions: self.setemptycode,
            first_deploys: self.first_deploys,
            mean_hex_code_size: ratio(self.hex_size_total, u128::from(self.setcode)),
        }
    }
}

impl Merge for D3Summary {
    fn merge(&mut self, other: Self) {
        self.setcode += other.setcode;
        self.setemptycode += other.setemptycode;
        self.first_deploys += other.first_deploys;
        self.hex_size_total += other.hex_size_total;
        self.contracts.extend(other.contracts);
    }
}

impl Accumulator<D3Record> for D3Summary {
    fn push(&mut self, rec: &D3Record) {
        match rec.action_kind {
            CodeAction::SetCode => {
                self.setcode += 1;
                self.hex_size_total += u128::from(rec.code_size_bytes);
                if !self.contracts.contains(&rec.account) {
                    self.contracts.insert(rec.account.clone());
                }
            }
            CodeAction::SetEmptyCode => self.setemptycode += 1,
        }
        self.first_deploys += u64::from(rec.is_first_deploy);
    }
}

// ---------------------------------------------------------------- D4

pub const TOP_FUNCTIONS: usize = 10;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct D4Summary {
    pub invocations: u64,
    pub errors: u64,
    pub authorizers: BTreeSet<AccountName>,
    pub contracts: BTreeSet<AccountName>,
    pub functions: FunctionCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D4Table {
    pub invocations: u64,
    pub failed_invocations: u64,
    pub authorizers: u64,
    pub contracts: u64,
    pub functions: u64,
    pub top_functions: Vec<RankedFunction>,
    pub top_functions_share: f64,
}

impl D4Summary {
    pub fn table(&self) -> D4Table {
        let top = self.functions.top_n(TOP_FUNCTIONS);
        let top_count: u64 = top.iter().map(|r| r.count).sum();
        D4Table {
            invocations: self.invocations,
            failed_invocations: self.errors,
            authorizers: self.authorizers.len() as u64,
            contracts: self.contracts.len() as u64,
            functions: self.functions.distinct() as u64,
            top_functions_share: ratio(u128::from(top_count), u128::from(self.invocations)),
            top_functions: top,
        }
    }
}

impl Merge for D4Summary {
    fn merge(&mut self, other: Self) {
        self.invocations += other.invocations;
        self.errors += other.errors;
        self.authorizers.extend(other.authorizers);
        self.contracts.extend(other.contracts);
        self.functions.merge(other.functions);
    }
}

impl Accumulator<D4Record> for D4Summary {
    fn push(&mut self, rec: &D4Record) {
        self.invocations += 1;
        self.errors += u64::from(rec.has_error);
        if let Some(a) = &rec.authorizer {
            if !self.authorizers.contains(a) {
                self.authorizers.insert(a.clone());
            }
        }
        if !self.contracts.contains(&rec.contract) {
            self.contracts.insert(rec.contract.clone());
        }
        self.functions.record(rec.function.as_str());
    }
}

// ---------------------------------------------------------------- D5

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct D5Summary {
    pub tokens: u64,
    pub transfers: u64,
    pub token_contracts: BTreeSet<AccountName>,
    pub holders: BTreeSet<AccountName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D5Table {
    pub token_contracts: u64,
    pub tokens: u64,
    pub token_transfers: u64,
    pub holders: u64,
}

impl D5Summary {
    pub fn table(&self) -> D5Table {
        D5Table {
            token_contracts: self.token_contracts.len() as u64,
            tokens: self.tokens,
            token_transfers: self.transfers,
            holders: self.holders.len() as u64,
        }
    }
}

impl Merge for D5Summary {
    fn merge(&mut self, other: Self) {
        self.tokens += other.tokens;
        self.transfers += other.transfers;
        self.token_contracts.extend(other.token_contracts);
        self.holders.extend(other.holders);
    }
}

impl Accumulator<D5TokenRow> for D5Summary {
    fn push(&mut self, row: &D5TokenRow) {
        self.tokens += 1;
        if !self.token_contracts.contains(&row.contract) {
            self.token_contracts.insert(row.contract.clone());
        }
    }
}

impl Accumulator<D5TransferRow> for D5Summary {
    fn push(&mut self, row: &D5TransferRow) {
        self.transfers += 1;
        for account in [&row.from, &row.to] {
            if !self.holders.contains(account) {
                self.holders.insert(account.clone());
            }
        }
    }
}

// ---------------------------------------------------------------- D6

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct D6Summary {
    pub creations: u64,
    pub creators: BTreeSet<AccountName>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D6Table {
    pub creations: u64,
    pub creators: u64,
    pub mean_accounts_per_creator: f64,
}

impl D6Table {
    pub fn from_counts(creations: u64, creators: u64) -> Self {
        D6Table {
            creations,
            creators,
            mean_accounts_per_creator: ratio(u128::from(creations), u128::from(creators)),
        }
    }
}

impl D6Summary {
    pub fn table(&self) -> D6Table {
        D6Table::from_counts(self.creations, self.creators.len() as u64)
    }
}

impl Merge for D6Summary {
    fn merge(&mut self, other: Self) {
        self.creations += other.creations;
        self.creators.extend(other.creators);
    }
}

impl Accumulator<D6Record> for D6Summary {
    fn push(&mut self, rec: &D6Record) {
        self.creations += 1;
        if !self.creators.contains(&rec.creator) {
            self.creators.insert(rec.creator.clone());
        }
    }
}

// ---------------------------------------------------------------- D7

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct D7Summary {
    pub counts: BTreeMap<ResourceAction, u64>,
    pub units: BTreeMap<ResourceAction, u128>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct D7Table {
    pub actions: BTreeMap<String, u64>,
    pub categories: BTreeMap<String, u64>,
    pub eos_units_by_action: BTreeMap<String, u128>,
}

impl D7Summary {
    pub fn table(&self) -> D7Table {
        let mut categories: BTreeMap<String, u64> =
            ResourceCategory::ALL.iter().map(|c| (String::from(c.as_str()), 0)).collect();
        let mut actions = BTreeMap::new();
        let mut eos_units_by_action = BTreeMap::new();
        for action in ResourceAction::ALL {
            let count = self.counts.get(&action).copied().unwrap_or(0);
            actions.insert(String::from(action.as_str()), count);
            eos_units_by_action.insert(String::from(action.as_str()), self.units.get(&action).copied().unwrap_or(0));
            *categories.get_mut(action.category().as_str()).unwrap() += count;
        }
        D7Table {
            actions,
            categories,
            eos_units_by_action,
        }
    }
}

impl Merge for D7Summary {
    fn merge(&mut self, other: Self) {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_insert(0) += v;
        }
        for (k, v) in other.units {
            *self.units.entry(k).or_insert(0) += v;
        }
    }
}

impl Accumulator<D7Record> for D7Summary {
    fn push(&mut self, rec: &D7Record) {
        *self.counts.entry(rec.action).or_insert(0) += 1;
        *self.units.entry(rec.action).or_insert(0) += rec.eos_amount.units().max(0) as u128;
    }
}
