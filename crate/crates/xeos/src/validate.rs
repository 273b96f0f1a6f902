//! Checks a directory of dataset CSVs against the row invariants of D1 to D7.
//!
//! Parsing already enforces the value grammars (account names, enums,
//! digests, amounts); the checks here cover ordering, uniqueness and the
//! consistency between files.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::Serialize;
use xeos_core::etl::*;
use xeos_core::{AccountName, Digest};

use crate::dataset::{dataset_files, read_dataset, CsvRow, ANOMALIES_FILE};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub file: String,
    /// 1-based line of the offending row; 0 when the file as a whole is at
    /// fault.
    pub line: u64,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.message)
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct ValidationReport {
    pub files: Vec<String>,
    pub rows: u64,
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}

struct Checker<'a> {
    dir: &'a Path,
    report: ValidationReport,
}

impl Checker<'_> {
    fn violation(&mut self, file: &str, line: u64, message: impl Into<String>) {
        self.report.violations.push(Violation {
            file: file.to_string(),
            line,
            message: message.into(),
        });
    }

    /// Visits every parseable row of `T`'s file; unparseable rows become
    /// violations. Returns false when the file is absent.
    fn rows<T: CsvRow>(&mut self, mut visit: impl FnMut(&mut Self, u64, T)) -> bool {
        let path = self.dir.join(T::FILE);
        if !path.is_file() {
            return false;
        }
        self.report.files.push(T::FILE.to_string());
        let rows = match read_dataset::<T>(&path) {
            Ok(rows) => rows,
            Err(e) => {
                self.violation(T::FILE, 1, strip_location(&e, &path));
                return true;
            }
        };
        let mut last_line = 0;
        for row in rows {
            match row {
                Ok((line, row)) => {
                    self.report.rows += 1;
                    last_line = line;
                    visit(self, line, row);
                }
                Err(e) => {
                    let line = match &e {
                        Error::Parse { line, .. } => *line,
                        _ => last_line + 1,
                    };
                    self.violation(T::FILE, line, strip_location(&e, &path));
                    if !matches!(e, Error::Parse { .. }) {
                        break;
                    }
                }
            }
        }
        true
    }

    fn block_order(&mut self, file: &str, line: u64, last: &mut u64, block_num: u64) {
        if block_num < *last {
            self.violation(file, line, format!("block {block_num} after block {last}"));
        }
        *last = block_num.max(*last);
    }
}

fn strip_location(e: &Error, path: &PathBuf) -> String {
    match e {
        Error::Parse { message, .. } => message.clone(),
        other => other.to_string().replace(&format!("{}: ", path.display()), ""),
    }
}

/// Validates every dataset file present in `dir`.
pub fn validate(dir: impl AsRef<Path>, system: &SystemAccounts) -> Result<ValidationReport> {
    let dir = dir.as_ref();
    if !dir.is_dir() {
        return Err(Error::io(
            dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "dataset directory not found"),
        ));
    }
    let known: Vec<&str> = DatasetId::ALL
        .iter()
        .flat_map(|&d| dataset_files(d).iter().copied())
        .chain([ANOMALIES_FILE])
        .collect();
    if !known.iter().any(|f| dir.join(f).is_file()) {
        return Err(Error::Empty(format!("no dataset files in {}", dir.display())));
    }
    let mut c = Checker {
        dir,
        report: ValidationReport::default(),
    };
    check_d1(&mut c);
    check_d2(&mut c);
    check_d3(&mut c);
    check_d4(&mut c, system);
    check_d5(&mut c);
    check_d6(&mut c);
    check_d7(&mut c);
    c.rows(|_, _, _: Anomaly| {});
    Ok(c.report)
}

fn check_d1(c: &mut Checker<'_>) {
    let mut blocks: BTreeMap<u64, (u64, u64)> = BTreeMap::new();
    let mut last = 0;
    let have_blocks = c.rows(|c, line, r: D1BlockRow| {
        if r.block_num <= last && last != 0 {
            c.violation(D1BlockRow::FILE, line, format!("block {} does not follow block {last}", r.block_num));
        }
        last = r.block_num.max(last);
        if blocks.insert(r.block_num, (r.tx_count, line)).is_some() {
            c.violation(D1BlockRow::FILE, line, format!("duplicate block {}", r.block_num));
        }
    });

    let mut tx_per_block: HashMap<u64, u64> = HashMap::new();
    let mut txs: HashSet<(Digest, u64)> = HashSet::new();
    let mut tx_ids: HashSet<Digest> = HashSet::new();
    let mut last = 0;
    let have_txs = c.rows(|c, line, r: D1TransactionRow| {
        c.block_order(D1TransactionRow::FILE, line, &mut last, r.block_num);
        if have_blocks && !blocks.contains_key(&r.block_num) {
            c.violation(D1TransactionRow::FILE, line, format!("block {} has no block row", r.block_num));
        }
        if !txs.insert((r.tx_id.clone(), r.block_num)) {
            c.violation(D1TransactionRow::FILE, line, format!("duplicate transaction {}", r.tx_id));
        }
        tx_ids.insert(r.tx_id);
        *tx_per_block.entry(r.block_num).or_insert(0) += 1;
    });
    if have_blocks && have_txs {
        for (block, (count, line)) in &blocks {
            let actual = tx_per_block.get(block).copied().unwrap_or(0);
            if actual != *count {
                c.violation(
                    D1BlockRow::FILE,
                    *line,
                    format!("tx_count {count} but {actual} transaction rows for block {block}"),
                );
            }
        }
    }

    let mut next_index: HashMap<Digest, u32> = HashMap::new();
    c.rows(|c, line, r: D1ActionRow| {
        if have_txs && !tx_ids.contains(&r.tx_id) {
            c.violation(D1ActionRow::FILE, line, format!("unknown transaction {}", r.tx_id));
        }
        let expected = next_index.entry(r.tx_id.clone()).or_insert(0);
        if r.action_index != *expected {
            c.violation(
                D1ActionRow::FILE,
                line,
                format!("action_index {} where {} was expected", r.action_index, expected),
            );
        }
        *expected = r.action_index + 1;
        if serde_json::from_str::<serde_json::Map<String, serde_json::Value>>(&r.data).is_err() {
            c.violation(D1ActionRow::FILE, line, "data is not a JSON object");
        }
    });
}

fn check_d2(c: &mut Checker<'_>) {
    let mut last = 0;
    c.rows(|c, line, r: D2Record| {
        c.block_order(D2Record::FILE, line, &mut last, r.block_num);
        if r.amount.units() < 0 {
            c.violation(D2Record::FILE, line, "negative amount");
        }
    });
}

fn check_d3(c: &mut Checker<'_>) {
    let mut deployed: BTreeSet<AccountName> = BTreeSet::new();
    let mut last = 0;
    c.rows(|c, line, r: D3Record| {
        c.block_order(D3Record::FILE, line, &mut last, r.block_num);
        match r.action_kind {
            CodeAction::SetEmptyCode => {
                if !r.code_hash.is_empty() || r.code_size_bytes != 0 {
                    c.violation(D3Record::FILE, line, "setemptycode with a code hash or size");
                }
                if r.is_first_deploy {
                    c.violation(D3Record::FILE, line, "setemptycode marked as first deploy");
                }
            }
            CodeAction::SetCode => {
                if Digest::new(r.code_hash.as_str()).is_err() {
                    c.violation(D3Record::FILE, line, "code_hash is not a 64-character hex digest");
                }
                if r.code_size_bytes == 0 || r.code_size_bytes % 2 != 0 {
                    c.violation(D3Record::FILE, line, "hex code size must be even and non-zero");
                }
                let first = deployed.insert(r.account.clone());
                if first != r.is_first_deploy {
                    c.violation(
                        D3Record::FILE,
                        line,
                        format!("is_first_deploy={} for account {}", r.is_first_deploy, r.account),
                    );
                }
            }
        }
    });
}

fn check_d4(c: &mut Checker<'_>, system: &SystemAccounts) {
    let mut last = 0;
    c.rows(|c, line, r: D4Record| {
        c.block_order(D4Record::FILE, line, &mut last, r.block_num);
        if system.contains(&r.contract) {
            c.violation(D4Record::FILE, line, format!("system contract {}", r.contract));
        }
        if !r.has_error && !r.error_text.is_empty() {
            c.violation(D4Record::FILE, line, "error_text without has_error");
        }
    });
}

fn check_d5(c: &mut Checker<'_>) {
    let mut tokens: HashSet<(AccountName, String)> = HashSet::new();
    let have_tokens = c.rows(|c, line, r: D5TokenRow| {
        if !valid_symbol(&r.symbol) {
            c.violation(D5TokenRow::FILE, line, format!("invalid symbol {:?}", r.symbol));
        }
        if r.max_supply_units < 0 {
            c.violation(D5TokenRow::FILE, line, "negative maximum supply");
        }
        if !tokens.insert((r.contract.clone(), r.symbol.clone())) {
            c.violation(D5TokenRow::FILE, line, format!("duplicate token {} on {}", r.symbol, r.contract));
        }
    });
    let mut last = 0;
    c.rows(|c, line, r: D5TransferRow| {
        c.block_order(D5TransferRow::FILE, line, &mut last, r.block_num);
        if r.amount_units < 0 {
            c.violation(D5TransferRow::FILE, line, "negative amount");
        }
        if have_tokens && !tokens.contains(&(r.contract.clone(), r.symbol.clone())) {
            c.violation(D5TransferRow::FILE, line, format!("token {} on {} was never created", r.symbol, r.contract));
        }
    });
}

fn valid_symbol(s: &str) -> bool {
    (1..=7).contains(&s.len()) && s.bytes().all(|b| b.is_ascii_uppercase())
}

fn check_d6(c: &mut Checker<'_>) {
    let mut seen: HashSet<AccountName> = HashSet::new();
    let mut last = 0;
    c.rows(|c, line, r: D6Record| {
        c.block_order(D6Record::FILE, line, &mut last, r.block_num);
        if !seen.insert(r.new_account.clone()) {
            c.violation(D6Record::FILE, line, format!("account {} created twice", r.new_account));
        }
    });
}

fn check_d7(c: &mut Checker<'_>) {
    let mut last = 0;
    c.rows(|c, line, r: D7Record| {
        c.block_order(D7Record::FILE, line, &mut last, r.block_num);
        if r.action.category() != r.category {
            c.violation(
                D7Record::FILE,
                line,
                format!("{} belongs to {}, not {}", r.action, r.action.category(), r.category),
            );
        }
        if r.eos_amount.units() < 0 {
            c.violation(D7Record::FILE, line, "negative amount");
        }
    });
}
