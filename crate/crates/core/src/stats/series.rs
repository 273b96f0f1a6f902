use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::num::NonZeroU64;

use serde::Serialize;

use super::{ratio, Accumulator, Merge, BLOCK_INTERVAL_SECS};
use crate::etl::{CodeAction, D1BlockRow, D1TransactionRow, D2Record, D3Record, D4Record, D5TransferRow, D6Record, D7Record, ResourceCategory, TransferKind};

pub const DEFAULT_BUCKET_SIZE: u64 = 100_000;

/// One metric value of a bucket row.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum SeriesValue {
    Count(u128),
    Real(f64),
}

impl fmt::Display for SeriesValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SeriesValue::Count(c) => write!(f, "{c}"),
            SeriesValue::Real(r) => write!(f, "{r}"),
        }
    }
}

/// Per-bucket counters of one dataset.
pub trait BucketCell: Default + Clone + PartialEq + Merge {
    const COLUMNS: &'static [&'static str];
    fn values(&self) -> Vec<SeriesValue>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketRow {
    /// First block of the bucket.
    pub bucket_start: u64,
    pub values: Vec<SeriesValue>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BucketSeries {
    pub bucket_size: u64,
    pub columns: Vec<&'static str>,
    pub rows: Vec<BucketRow>,
}

impl BucketSeries {
    /// Values of one metric column, in bucket order.
    pub fn column(&self, metric: &str) -> Option<Vec<SeriesValue>> {
        let idx = self.columns.iter().position(|c| *c == metric)?;
        Some(self.rows.iter().map(|r| r.values[idx]).collect())
    }
}

/// Counters keyed by block bucket. Block `b` falls in bucket
/// `(b - 1) / bucket_size`, so with the default size the first bucket holds
/// blocks 1 to 100,000.
#[derive(Debug, Clone, PartialEq)]
pub struct Buckets<C> {
    bucket_size: NonZeroU64,
    cells: BTreeMap<u64, C>,
}

impl<C: BucketCell> Buckets<C> {
    pub fn new(bucket_size: NonZeroU64) -> Self {
        Self {
            bucket_size,
            cells: BTreeMap::new(),
        }
    }

    pub fn bucket_size(&self) -> u64 {
        self.bucket_size.get()
    }

    pub fn cell_mut(&mut self, block_num: u64) -> &mut C {
        let idx = block_num.saturating_sub(1) / self.bucket_size;
        self.cells.entry(idx).or_default()
    }

    /// Contiguous rows from the first to the last populated bucket; buckets
    /// in between with no data are emitted as zero rows.
    pub fn series(&self) -> BucketSeries {
        let size = self.bucket_size.get();
        let mut rows = Vec::new();
        if let (Some((&first, _)), Some((&last, _))) = (self.cells.first_key_value(), self.cells.last_key_value()) {
            let empty = C::default();
            for idx in first..=last {
                let cell = self.cells.get(&idx).unwrap_or(&empty);
                rows.push(BucketRow {
                    bucket_start: idx * size + 1,
                    values: cell.values(),
                });
            }
        }
        BucketSeries {
            bucket_size: size,
            columns: C::COLUMNS.to_vec(),
            rows,
        }
    }
}

impl<C: BucketCell> Default for Buckets<C> {
    fn default() -> Self {
        Self::new(NonZeroU64::new(DEFAULT_BUCKET_SIZE).unwrap())
    }
}

impl<C: BucketCell> Merge for Buckets<C> {
    fn merge(&mut self, other: Self) {
        assert_eq!(self.bucket_size, other.bucket_size, "bucket sizes differ");
        for (idx, cell) in other.cells {
            self.cells.entry(idx).or_default().merge(cell);
        }
    }
}

macro_rules! counter_cell {
    ($(#[$meta:meta])* $name:ident { $($field:ident),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, Eq)]
        pub struct $name {
            $(pub $field: u128,)+
        }

        impl Merge for $name {
            fn merge(&mut self, other: Self) {
                $(self.$field += other.$field;)+
            }
        }
    };
}

counter_cell!(D1Cell { blocks, transactions, deferred, actions, cpu_us, net_words });

impl BucketCell for D1Cell {
    const COLUMNS: &'static [&'static str] = &[
        "block_count",
        "tx_count",
        "action_count",
        "deferred_count",
        "tps",
        "cpu_ms_per_block",
        "net_words_per_block",
    ];

    fn values(&self) -> Vec<SeriesValue> {
        vec![
            SeriesValue::Count(self.blocks),
            SeriesValue::Count(self.transactions),
            SeriesValue::Count(self.actions),
            SeriesValue::Count(self.deferred),
            SeriesValue::Real(ratio(self.transactions, self.blocks) / BLOCK_INTERVAL_SECS),
            SeriesValue::Real(ratio(self.cpu_us, self.blocks) / 1000.0),
            SeriesValue::Real(ratio(self.net_words, self.blocks)),
        ]
    }
}

impl Accumulator<D1BlockRow> for Buckets<D1Cell> {
    fn push(&mut self, row: &D1BlockRow) {
        self.cell_mut(row.block_num).blocks += 1;
    }
}

impl Accumulator<D1TransactionRow> for Buckets<D1Cell> {
    fn push(&mut self, row: &D1TransactionRow) {
        let cell = self.cell_mut(row.block_num);
        cell.transactions += 1;
        cell.deferred += u128::from(row.is_deferred);
        cell.cpu_us += u128::from(row.cpu_usage_us);
        cell.net_words += u128::from(row.net_usage_words);
    }
}

impl Buckets<D1Cell> {
    /// Action rows carry no block number; the caller supplies the block of
    /// the owning transaction.
    pub fn push_action(&mut self, block_num: u64) {
        self.cell_mut(block_num).actions += 1;
    }
}

counter_cell!(D2Cell { internal, external, internal_units, external_units });

impl BucketCell for D2Cell {
    const COLUMNS: &'static [&'static str] =
        &["internal_count", "external_count", "internal_units", "external_units"];

    fn values(&self) -> Vec<SeriesValue> {
        [self.internal, self.external, self.internal_units, self.external_units]
            .into_iter()
            .map(SeriesValue::Count)
            .collect()
    }
}

impl Accumulator<D2Record> for Buckets<D2Cell> {
    fn push(&mut self, rec: &D2Record) {
        let cell = self.cell_mut(rec.block_num);
        let units = rec.amount.units().max(0) as u128;
        match rec.kind {
            TransferKind::Internal => {
                cell.internal += 1;
                cell.internal_units += units;
            }
            TransferKind::External => {
                cell.external += 1;
                cell.external_units += units;
            }
        }
    }
}

counter_cell!(D3Cell { setcode, setemptycode });

impl BucketCell for D3Cell {
    const COLUMNS: &'static [&'static str] = &["setcode_count", "setemptycode_count"];

    fn values(&self) -> Vec<SeriesValue> {
        vec![SeriesValue::Count(self.setcode), SeriesValue::Count(self.setemptycode)]
    }
}

impl Accumulator<D3Record> for Buckets<D3Cell> {
    fn push(&mut self, rec: &D3Record) {
        let cell = self.cell_mut(rec.block_num);
        match rec.action_kind {
            CodeAction::SetCode => cell.setcode += 1,
            CodeAction::SetEmptyCode => cell.setemptycode += 1,
        }
    }
}

counter_cell!(D4Cell { invocations, errors });

impl BucketCell for D4Cell {
    const COLUMNS: &'static [&'static str] = &["invocation_count", "error_count"];

    fn values(&self) -> Vec<SeriesValue> {
        vec![SeriesValue::Count(self.invocations), SeriesValue::Count(self.errors)]
    }
}

impl Accumulator<D4Record> for Buckets<D4Cell> {
    fn push(&mut self, rec: &D4Record) {
        let cell = self.cell_mut(rec.block_num);
        cell.invocations += 1;
        cell.errors += u128::from(rec.has_error);
    }
}

counter_cell!(D5Cell { transfers });

impl BucketCell for D5Cell {
    const COLUMNS: &'static [&'static str] = &["token_transfer_count"];

    fn values(&self) -> Vec<SeriesValue> {
        vec![SeriesValue::Count(self.transfers)]
    }
}

impl Accumulator<D5TransferRow> for Buckets<D5Cell> {
    fn push(&mut self, rec: &D5TransferRow) {
        self.cell_mut(rec.block_num).transfers += 1;
    }
}

counter_cell!(D6Cell { creations });

impl BucketCell for D6Cell {
    const COLUMNS: &'static [&'static str] = &["creation_count"];

    fn values(&self) -> Vec<SeriesValue> {
        vec![SeriesValue::Count(self.creations)]
    }
}

impl Accumulator<D6Record> for Buckets<D6Cell> {
    fn push(&mut self, rec: &D6Record) {
        self.cell_mut(rec.block_num).creations += 1;
    }
}

counter_cell!(D7Cell { cpu, net, ram, rex, eos_units });

impl BucketCell for D7Cell {
    const COLUMNS: &'static [&'static str] = &["cpu_count", "net_count", "ram_count", "rex_count", "eos_units"];

    fn values(&self) -> Vec<SeriesValue> {
        [self.cpu, self.net, self.ram, self.rex, self.eos_units]
            .into_iter()
            .map(SeriesValue::Count)
            .collect()
    }
}

impl Accumulator<D7Record> for Buckets<D7Cell> {
    fn push(&mut self, rec: &D7Record) {
        let cell = self.cell_mut(rec.block_num);
        match rec.category {
            ResourceCategory::Cpu => cell.cpu += 1,
            ResourceCategory::Net => cell.net += 1,
            ResourceCategory::Ram => cell.ram += 1,
            ResourceCategory::Rex => cell.rex += 1,
        }
        cell.eos_units += rec.eos_amount.units().max(0) as u128;
    }
}
