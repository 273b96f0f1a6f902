use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{Accumulator, Merge};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedFunction {
    pub function: String,
    pub count: u64,
    pub share: f64,
}

/// Call counts per function name.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionCounts(BTreeMap<String, u64>);

impl FunctionCounts {
    pub fn record(&mut self, function: &str) {
        self.add(function, 1);
    }

    pub fn add(&mut self, function: &str, count: u64) {
        match self.0.get_mut(function) {
            Some(c) => *c += count,
            None => {
                self.0.insert(String::from(function), count);
            }
        }
    }

    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn distinct(&self) -> usize {
        self.0.len()
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.0
    }

    pub fn top_n(&self, n: usize) -> Vec<RankedFunction> {
        top_n(&self.0, n)
    }
}

impl Merge for FunctionCounts {
    fn merge(&mut self, other: Self) {
        for (function, count) in other.0 {
            *self.0.entry(function).or_insert(0) += count;
        }
    }
}

impl Accumulator<str> for FunctionCounts {
    fn push(&mut self, item: &str) {
        self.record(item);
    }
}

fn ranked(counts: &BTreeMap<String, u64>) -> Vec<(&String, u64)> {
    let mut entries: Vec<(&String, u64)> = counts.iter().map(|(k, v)| (k, *v)).collect();
    // stable sort over key order keeps ties lexicographic
    entries.sort_by(|a, b| b.1.cmp(&a.1));
    entries
}

/// The `n` most frequent entries, by descending count with ties broken by
/// name. `share` is the fraction of the overall total.
pub fn top_n(counts: &BTreeMap<String, u64>, n: usize) -> Vec<RankedFunction> {
    let total: u64 = counts.values().sum();
    ranked(counts)
        .into_iter()
        .take(n)
        .map(|(function, count)| RankedFunction {
            function: function.clone(),
            count,
            share: if total == 0 { 0.0 } else { count as f64 / total as f64 },
        })
        .collect()
}

/// Lowercases, splits on anything that is not alphanumeric and drops tokens
/// shorter than two characters.
pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| t.chars().count() >= 2)
        .map(|t| t.to_lowercase())
}

/// Term counts over a corpus of short texts (transfer memos).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermFrequency(BTreeMap<String, u64>);

impl TermFrequency {
    pub fn record_text(&mut self, text: &str) {
        for term in tokenize(text) {
            *self.0.entry(term).or_insert(0) += 1;
        }
    }

    pub fn count(&self, term: &str) -> u64 {
        self.0.get(term).copied().unwrap_or(0)
    }

    pub fn counts(&self) -> &BTreeMap<String, u64> {
        &self.0
    }

    /// Terms by descending count, ties by term.
    pub fn ranked(&self) -> Vec<(String, u64)> {
        ranked(&self.0).into_iter().map(|(t, c)| (t.clone(), c)).collect()
    }
}

impl Merge for TermFrequency {
    fn merge(&mut self, other: Self) {
        for (term, count) in other.0 {
            *self.0.entry(term).or_insert(0) += count;
        }
    }
}

impl Accumulator<str> for TermFrequency {
    fn push(&mut self, item: &str) {
        self.record_text(item);
    }
}
