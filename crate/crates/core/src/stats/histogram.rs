use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Accumulator, Merge};

/// Counts of non-negative integers in decade bins `[10^k, 10^(k+1))` for
/// `k` in `min_exp..max_exp`, with an underflow bin for values below
/// `10^min_exp` (zero included) and an overflow bin from `10^max_exp` up.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogHistogram {
    min_exp: u32,
    max_exp: u32,
    underflow: u64,
    bins: Vec<u64>,
    overflow: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramBin {
    /// Inclusive lower edge; 0 for the underflow bin.
    pub lower: u64,
    /// Exclusive upper edge; `None` for the overflow bin.
    pub upper: Option<u64>,
    pub count: u64,
}

impl LogHistogram {
    pub fn new(min_exp: u32, max_exp: u32) -> Self {
        assert!(min_exp <= max_exp && max_exp <= 19, "decade range must fit in u64");
        Self {
            min_exp,
            max_exp,
            underflow: 0,
            bins: vec![0; (max_exp - min_exp) as usize],
            overflow: 0,
        }
    }

    /// EOS amounts in 10⁻⁴ units: decades from 0.0001 EOS to 10⁸ EOS.
    pub fn eos_amounts() -> Self {
        Self::new(0, 12)
    }

    /// Code sizes in bytes: decades from 1 B to 1 GB.
    pub fn code_sizes() -> Self {
        Self::new(0, 9)
    }

    pub fn record(&mut self, value: u64) {
        let decade = value.checked_ilog10();
        match decade {
            None => self.underflow += 1,
            Some(d) if d < self.min_exp => self.underflow += 1,
            Some(d) if d >= self.max_exp => self.overflow += 1,
            Some(d) => self.bins[(d - self.min_exp) as usize] += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.underflow + self.overflow + self.bins.iter().sum::<u64>()
    }

    pub fn bins(&self) -> Vec<HistogramBin> {
        let mut out = Vec::with_capacity(self.bins.len() + 2);
        out.push(HistogramBin {
            lower: 0,
            upper: Some(10u64.pow(self.min_exp)),
            count: self.underflow,
        });
        for (i, &count) in self.bins.iter().enumerate() {
            let exp = self.min_exp + i as u32;
            out.push(HistogramBin {
                lower: 10u64.pow(exp),
                upper: Some(10u64.pow(exp + 1)),
                count,
            });
        }
        out.push(HistogramBin {
            lower: 10u64.pow(self.max_exp),
            upper: None,
            count: self.overflow,
        });
        out
    }

    /// The bin with the highest count (first on ties).
    pub fn modal_bin(&self) -> Option<HistogramBin> {
        let bins = self.bins();
        let best = bins.iter().map(|b| b.count).max().filter(|&c| c > 0)?;
        bins.into_iter().find(|b| b.count == best)
    }
}

impl Default for LogHistogram {
    fn default() -> Self {
        Self::eos_amounts()
    }
}

impl Merge for LogHistogram {
    fn merge(&mut self, other: Self) {
        assert_eq!((self.min_exp, self.max_exp), (other.min_exp, other.max_exp), "histogram shapes differ");
        self.underflow += other.underflow;
        self.overflow += other.overflow;
        for (a, b) in self.bins.iter_mut().zip(other.bins) {
            *a += b;
        }
    }
}

impl Accumulator<u64> for LogHistogram {
    fn push(&mut self, item: &u64) {
        self.record(*item);
    }
}
