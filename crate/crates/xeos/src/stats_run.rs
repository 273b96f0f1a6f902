//! Statistics over extracted datasets: `summary.json` plus `stats_*.csv`.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::num::NonZeroU64;
use std::path::{Path, PathBuf};

use serde::Serialize;
use xeos_core::etl::*;
use xeos_core::stats::*;

use crate::dataset::{read_dataset, CsvRow};
use crate::error::{Error, Result};

pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone)]
pub struct StatsOptions {
    /// Directory holding the dataset CSVs.
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    pub datasets: BTreeSet<DatasetId>,
    pub bucket_size: NonZeroU64,
    /// Overrides the 0.5 s block interval used for the summary tps.
    pub block_interval_secs: Option<f64>,
}

impl StatsOptions {
    pub fn new(input_dir: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            input_dir: input_dir.into(),
            output_dir: output_dir.into(),
            datasets: DatasetId::ALL.into_iter().collect(),
            bucket_size: NonZeroU64::new(DEFAULT_BUCKET_SIZE).unwrap(),
            block_interval_secs: None,
        }
    }
}

pub struct D1Stats {
    pub summary: D1Summary,
    pub series: Buckets<D1Cell>,
}

pub struct D2Stats {
    pub summary: D2Summary,
    pub series: Buckets<D2Cell>,
    pub amounts: LogHistogram,
    pub memo_terms: TermFrequency,
}

pub struct D3Stats {
    pub summary: D3Summary,
    pub series: Buckets<D3Cell>,
    pub code_sizes: LogHistogram,
}

pub struct D4Stats {
    pub summary: D4Summary,
    pub series: Buckets<D4Cell>,
}

pub struct D5Stats {
    pub summary: D5Summary,
    pub series: Buckets<D5Cell>,
    pub memo_terms: TermFrequency,
}

pub struct D6Stats {
    pub summary: D6Summary,
    pub series: Buckets<D6Cell>,
}

pub struct D7Stats {
    pub summary: D7Summary,
    pub series: Buckets<D7Cell>,
}

/// Accumulators for every dataset. Fed row by row, either from CSV files or
/// directly by the synthetic generator.
pub struct StatsSet {
    pub d1: D1Stats,
    pub d2: D2Stats,
    pub d3: D3Stats,
    pub d4: D4Stats,
    pub d5: D5Stats,
    pub d6: D6Stats,
    pub d7: D7Stats,
}

impl StatsSet {
    pub fn new(bucket_size: NonZeroU64) -> Self {
        Self {
            d1: D1Stats {
                summary: D1Summary::default(),
                series: Buckets::new(bucket_size),
            },
            d2: D2Stats {
                summary: D2Summary::default(),
                series: Buckets::new(bucket_size),
                amounts: LogHistogram::eos_amounts(),
                memo_terms: TermFrequency::default(),
            },
            d3: D3Stats {
                summary: D3Summary::default(),
                series: Buckets::new(bucket_size),
                code_sizes: LogHistogram::code_sizes(),
            },
            d4: D4Stats {
                summary: D4Summary::default(),
                series: Buckets::new(bucket_size),
            },
            d5: D5Stats {
                summary: D5Summary::default(),
                series: Buckets::new(bucket_size),
                memo_terms: TermFrequency::default(),
            },
            d6: D6Stats {
                summary: D6Summary::default(),
                series: Buckets::new(bucket_size),
            },
            d7: D7Stats {
                summary: D7Summary::default(),
                series: Buckets::new(bucket_size),
            },
        }
    }

    pub fn push_block(&mut self, row: &D1BlockRow) {
        self.d1.summary.push(row);
        self.d1.series.push(row);
    }

    pub fn push_transaction(&mut self, row: &D1TransactionRow) {
        self.d1.summary.push(row);
        self.d1.series.push(row);
    }

    /// Counts one action row belonging to a transaction of `block_num`.
    pub fn push_action(&mut self, block_num: u64) {
        self.d1.summary.actions += 1;
        self.d1.series.push_action(block_num);
    }

    pub fn push_transfer(&mut self, rec: &D2Record) {
        self.d2.summary.push(rec);
        self.d2.series.push(rec);
        self.d2.amounts.record(rec.amount.units().max(0) as u64);
        self.d2.memo_terms.record_text(&rec.memo);
    }

    pub fn push_contract(&mut self, rec: &D3Record) {
        self.d3.summary.push(rec);
        self.d3.series.push(rec);
        if rec.action_kind == CodeAction::SetCode {
            self.d3.code_sizes.record(rec.code_size_bytes);
        }
    }

    pub fn push_invocation(&mut self, rec: &D4Record) {
        self.d4.summary.push(rec);
        self.d4.series.push(rec);
    }

    pub fn push_token(&mut self, row: &D5TokenRow) {
        self.d5.summary.push(row);
    }

    pub fn push_token_transfer(&mut self, row: &D5TransferRow) {
        self.d5.summary.push(row);
        self.d5.series.push(row);
        self.d5.memo_terms.record_text(&row.memo);
    }

    pub fn push_account(&mut self, rec: &D6Record) {
        self.d6.summary.push(rec);
        self.d6.series.push(rec);
    }

    pub fn push_resource(&mut self, rec: &D7Record) {
        self.d7.summary.push(rec);
        self.d7.series.push(rec);
    }

    /// Renders the selected datasets.
    pub fn report(&self, datasets: &BTreeSet<DatasetId>) -> StatsReport {
        let mut report = StatsReport::default();
        for &id in datasets {
            let (summary, series) = match id {
                DatasetId::D1 => (to_value(&self.d1.summary.table()), self.d1.series.series()),
                DatasetId::D2 => {
                    report.histograms.insert("d2_amount".into(), self.d2.amounts.bins());
                    report.memo_terms.insert(id, self.d2.memo_terms.ranked());
                    (to_value(&self.d2.summary.table()), self.d2.series.series())
                }
                DatasetId::D3 => {
                    report.histograms.insert("d3_code_size".into(), self.d3.code_sizes.bins());
                    (to_value(&self.d3.summary.table()), self.d3.series.series())
                }
                DatasetId::D4 => {
                    let functions = self.d4.summary.functions.counts();
                    report.function_ranking = Some(top_n(functions, functions.len()));
                    (to_value(&self.d4.summary.table()), self.d4.series.series())
                }
                DatasetId::D5 => {
                    report.memo_terms.insert(id, self.d5.memo_terms.ranked());
                    (to_value(&self.d5.summary.table()), self.d5.series.series())
                }
                DatasetId::D6 => (to_value(&self.d6.summary.table()), self.d6.series.series()),
                DatasetId::D7 => (to_value(&self.d7.summary.table()), self.d7.series.series()),
            };
            report.summary.insert(id, summary);
            report.series.insert(id, series);
        }
        report
    }
}

/// Partial results over disjoint parts of a dataset combine into the result
/// over the whole.
impl Merge for StatsSet {
    fn merge(&mut self, other: Self) {
        self.d1.summary.merge(other.d1.summary);
        self.d1.series.merge(other.d1.series);
        self.d2.summary.merge(other.d2.summary);
        self.d2.series.merge(other.d2.series);
        self.d2.amounts.merge(other.d2.amounts);
        self.d2.memo_terms.merge(other.d2.memo_terms);
        self.d3.summary.merge(other.d3.summary);
        self.d3.series.merge(other.d3.series);
        self.d3.code_sizes.merge(other.d3.code_sizes);
        self.d4.summary.merge(other.d4.summary);
        self.d4.series.merge(other.d4.series);
        self.d5.summary.merge(other.d5.summary);
        self.d5.series.merge(other.d5.series);
        self.d5.memo_terms.merge(other.d5.memo_terms);
        self.d6.summary.merge(other.d6.summary);
        self.d6.series.merge(other.d6.series);
        self.d7.summary.merge(other.d7.summary);
        self.d7.series.merge(other.d7.series);
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("tables serialize")
}

/// Everything the stats command emits, in memory.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StatsReport {
    pub summary: BTreeMap<DatasetId, serde_json::Value>,
    pub series: BTreeMap<DatasetId, BucketSeries>,
    pub histograms: BTreeMap<String, Vec<HistogramBin>>,
    /// Every D4 function, ranked.
    pub function_ranking: Option<Vec<RankedFunction>>,
    pub memo_terms: BTreeMap<DatasetId, Vec<(String, u64)>>,
}

impl StatsReport {
    /// Writes `summary.json` and the `stats_*.csv` tables; returns the file
    /// names written.
    pub fn write(&self, dir: &Path) -> Result<Vec<String>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written = Vec::new();
        let mut put = |name: String, body: String| -> Result<()> {
            let path = dir.join(&name);
            fs::write(&path, body).map_err(|e| Error::io(&path, e))?;
            written.push(name);
            Ok(())
        };

        let mut summary = serde_json::to_string_pretty(&to_value(&self.summary)).expect("summary serializes");
        summary.push('\n');
        put(SUMMARY_FILE.into(), summary)?;

        for (id, series) in &self.series {
            let mut w = table_writer();
            let mut header = vec!["bucket_start"];
            header.extend(series.columns.iter().copied());
            w.write_record(&header).expect("in-memory write");
            for row in &series.rows {
                let mut cells = vec![row.bucket_start.to_string()];
                cells.extend(row.values.iter().map(|v| v.to_string()));
                w.write_record(&cells).expect("in-memory write");
            }
            put(format!("stats_{id}_series.csv"), finish_table(w))?;
        }
        for (name, bins) in &self.histograms {
            let mut w = table_writer();
            w.write_record(["lower", "upper", "count"]).expect("in-memory write");
            for b in bins {
                let upper = b.upper.map(|u| u.to_string()).unwrap_or_default();
                w.write_record([b.lower.to_string(), upper, b.count.to_string()])
                    .expect("in-memory write");
            }
            put(format!("stats_{name}_histogram.csv"), finish_table(w))?;
        }
        if let Some(ranking) = &self.function_ranking {
            let mut w = table_writer();
            w.write_record(["rank", "function", "count", "share"]).expect("in-memory write");
            for (i, r) in ranking.iter().enumerate() {
                w.write_record([(i + 1).to_string(), r.function.clone(), r.count.to_string(), r.share.to_string()])
                    .expect("in-memory write");
            }
            put("stats_d4_functions.csv".into(), finish_table(w))?;
        }
        for (id, terms) in &self.memo_terms {
            let mut w = table_writer();
            w.write_record(["rank", "term", "count"]).expect("in-memory write");
            for (i, (term, count)) in terms.iter().enumerate() {
                w.write_record([(i + 1).to_string(), term.clone(), count.to_string()])
                    .expect("in-memory write");
            }
            put(format!("stats_{id}_memo_terms.csv"), finish_table(w))?;
        }
        Ok(written)
    }
}

fn table_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new())
}

fn finish_table(w: csv::Writer<Vec<u8>>) -> String {
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

fn for_each_row<T: CsvRow>(dir: &Path, mut f: impl FnMut(T) -> Result<()>) -> Result<()> {
    let path = dir.join(T::FILE);
    if !path.exists() {
        return Err(Error::Empty(format!("missing dataset file {}", path.display())));
    }
    for row in read_dataset::<T>(&path)? {
        f(row?.1)?;
    }
    Ok(())
}

/// Reads the dataset files of one dataset into `set`.
pub fn load_dataset(set: &mut StatsSet, dir: &Path, id: DatasetId) -> Result<()> {
    match id {
        DatasetId::D1 => {
            for_each_row(dir, |r: D1BlockRow| Ok(set.push_block(&r)))?;
            // action rows carry only tx_id; map it to the block of the
            // transaction row
            let mut block_of = HashMap::new();
            for_each_row(dir, |r: D1TransactionRow| {
                block_of.insert(r.tx_id.clone(), r.block_num);
                set.push_transaction(&r);
                Ok(())
            })?;
            let path = dir.join(D1ActionRow::FILE);
            for_each_row(dir, |r: D1ActionRow| match block_of.get(&r.tx_id) {
                Some(&block) => Ok(set.push_action(block)),
                None => Err(Error::Parse {
                    path: path.clone(),
                    line: 0,
                    message: format!("action of unknown transaction {}", r.tx_id),
                }),
            })
        }
        DatasetId::D2 => for_each_row(dir, |r: D2Record| Ok(set.push_transfer(&r))),
        DatasetId::D3 => for_each_row(dir, |r: D3Record| Ok(set.push_contract(&r))),
        DatasetId::D4 => for_each_row(dir, |r: D4Record| Ok(set.push_invocation(&r))),
        DatasetId::D5 => {
            for_each_row(dir, |r: D5TokenRow| Ok(set.push_token(&r)))?;
            for_each_row(dir, |r: D5TransferRow| Ok(set.push_token_transfer(&r)))
        }
        DatasetId::D6 => for_each_row(dir, |r: D6Record| Ok(set.push_account(&r))),
        DatasetId::D7 => for_each_row(dir, |r: D7Record| Ok(set.push_resource(&r))),
    }
}

/// Computes statistics for the selected datasets without writing anything.
pub fn compute(opts: &StatsOptions) -> Result<StatsReport> {
    if opts.datasets.is_empty() {
        return Err(Error::Config("no datasets selected".into()));
    }
    if !opts.input_dir.is_dir() {
        return Err(Error::io(
            &opts.input_dir,
            std::io::Error::new(std::io::ErrorKind::NotFound, "dataset directory not found"),
        ));
    }
    let mut set = StatsSet::new(opts.bucket_size);
    for &id in &opts.datasets {
        load_dataset(&mut set, &opts.input_dir, id)?;
    }
    let mut report = set.report(&opts.datasets);
    if let (Some(secs), Some(d1)) = (opts.block_interval_secs, report.summary.get_mut(&DatasetId::D1)) {
        if !(secs > 0.0) {
            return Err(Error::Config("block interval must be positive".into()));
        }
        let mean = set.d1.summary.table().mean_tx_per_block;
        d1["tps"] = tps_with_interval(mean, secs).into();
    }
    Ok(report)
}

/// Computes and writes statistics; returns the report and the files written.
pub fn run(opts: &StatsOptions) -> Result<(StatsReport, Vec<String>)> {
    let report = compute(opts)?;
    let files = report.write(&opts.output_dir)?;
    Ok((report, files))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{extract, ExtractOptions};
    use crate::synth::{generate, GenConfig};
    use xeos_core::Digest;

    fn split_at<T: CsvRow>(dir: &Path, cut: u64, block: impl Fn(&T) -> u64) -> (Vec<T>, Vec<T>) {
        read_dataset::<T>(dir.join(T::FILE))
            .unwrap()
            .map(|r| r.unwrap().1)
            .partition(|r| block(r) <= cut)
    }

    #[test]
    fn merged_halves_equal_the_whole() {
        let raw = tempfile::tempdir().unwrap();
        let out = tempfile::tempdir().unwrap();
        generate(&GenConfig::with_seed(21, 300), raw.path()).unwrap();
        extract(&ExtractOptions::new(raw.path(), out.path())).unwrap();
        let size = NonZeroU64::new(70).unwrap();
        let ids: BTreeSet<DatasetId> = [DatasetId::D1, DatasetId::D2, DatasetId::D7].into_iter().collect();

        let mut whole = StatsSet::new(size);
        for &id in &ids {
            load_dataset(&mut whole, out.path(), id).unwrap();
        }

        let mut left = StatsSet::new(size);
        let mut right = StatsSet::new(size);
        let (a, b) = split_at(out.path(), 123, |r: &D1BlockRow| r.block_num);
        a.iter().for_each(|r| left.push_block(r));
        b.iter().for_each(|r| right.push_block(r));
        let (a, b) = split_at(out.path(), 123, |r: &D1TransactionRow| r.block_num);
        a.iter().for_each(|r| left.push_transaction(r));
        b.iter().for_each(|r| right.push_transaction(r));
        let blocks: HashMap<Digest, u64> = a.iter().chain(&b).map(|r| (r.tx_id.clone(), r.block_num)).collect();
        for row in read_dataset::<D1ActionRow>(out.path().join(D1ActionRow::FILE)).unwrap() {
            let n = blocks[&row.unwrap().1.tx_id];
            if n <= 123 { left.push_action(n) } else { right.push_action(n) }
        }
        let (a, b) = split_at(out.path(), 123, |r: &D2Record| r.block_num);
        a.iter().for_each(|r| left.push_transfer(r));
        b.iter().for_each(|r| right.push_transfer(r));
        let (a, b) = split_at(out.path(), 123, |r: &D7Record| r.block_num);
        a.iter().for_each(|r| left.push_resource(r));
        b.iter().for_each(|r| right.push_resource(r));

        left.merge(right);
        assert_eq!(left.report(&ids), whole.report(&ids));
    }

    #[test]
    fn report_covers_only_requested_datasets() {
        let set = StatsSet::new(NonZeroU64::new(10).unwrap());
        let report = set.report(&[DatasetId::D6].into_iter().collect());
        assert_eq!(report.summary.keys().collect::<Vec<_>>(), [&DatasetId::D6]);
        assert!(report.function_ranking.is_none());
        let dir = tempfile::tempdir().unwrap();
        let written = report.write(dir.path()).unwrap();
        assert_eq!(written[0], SUMMARY_FILE);
        for name in &written {
            assert!(dir.path().join(name).is_file(), "{name}");
        }
    }
}
