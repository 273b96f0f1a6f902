//! Summary tables and figure-style aggregations over the datasets.
//!
//! Every statistic is an accumulator with an associative `merge`, so a corpus
//! can be split at any point, folded in parallel and merged back to the same
//! result as a single sequential fold.

mod histogram;
mod rank;
mod series;
mod summary;

pub use histogram::{HistogramBin, LogHistogram};
pub use rank::{tokenize, top_n, FunctionCounts, RankedFunction, TermFrequency};
pub use series::{
    BucketCell, BucketRow, BucketSeries, Buckets, D1Cell, D2Cell, D3Cell, D4Cell, D5Cell, D6Cell, D7Cell,
    SeriesValue, DEFAULT_BUCKET_SIZE,
};
pub use summary::*;

/// Seconds between blocks on an EOSIO-like chain.
pub const BLOCK_INTERVAL_SECS: f64 = 0.5;

/// Combines two partial results of the same statistic.
pub trait Merge {
    fn merge(&mut self, other: Self);
}

/// A streaming statistic over items of type `T`.
pub trait Accumulator<T: ?Sized>: Merge {
    fn push(&mut self, item: &T);
}

/// Folds `items` into a fresh accumulator.
pub fn fold<'a, T: 'a, A>(items: impl IntoIterator<Item = &'a T>) -> A
where
    A: Accumulator<T> + Default,
{
    let mut acc = A::default();
    for item in items {
        acc.push(item);
    }
    acc
}

/// Transactions per second for a mean transaction count per block.
pub fn tps(mean_tx_per_block: f64) -> f64 {
    tps_with_interval(mean_tx_per_block, BLOCK_INTERVAL_SECS)
}

pub fn tps_with_interval(mean_tx_per_block: f64, block_interval_secs: f64) -> f64 {
    mean_tx_per_block / block_interval_secs
}

pub(crate) fn ratio(numerator: u128, denominator: u128) -> f64 {
    if denominator == 0 {
        0.0
    } else {
        numerator as f64 / denominator as f64
    }
}
