//! Extraction run: raw files in, dataset CSVs and `anomalies.csv` out.
//!
//! Each requested dataset runs on its own thread with its own read streams.
//! Trace-based datasets get block timestamps from a header-only pass over the
//! block files, merged by block number.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::iter::Peekable;
use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use xeos_core::etl::*;
use xeos_core::{ActionTrace, RawBlock, Timestamp, TransactionReceipt};

use crate::dataset::{DatasetWriter, WriteReport};
use crate::error::{Error, Result};
use crate::ingest::{read_stream, BlockRange, ChainRecord, FileKind, RawFileSet, RecordStream};

#[derive(Debug, Clone)]
pub struct ExtractOptions {
    pub input_dir: PathBuf,
    pub output_dir: PathBuf,
    pub range: Option<BlockRange>,
    pub datasets: BTreeSet<DatasetId>,
    pub strict: bool,
    pub allow_gaps: bool,
    pub system_accounts: SystemAccounts,
}

impl ExtractOptions {
    pub fn new(input_dir: impl Into<PathBuf>, output_dir: impl Into<PathBuf>) -> Self {
        Self {
            input_dir: input_dir.into(),
            output_dir: output_dir.into(),
            range: None,
            datasets: DatasetId::ALL.into_iter().collect(),
            strict: false,
            allow_gaps: false,
            system_accounts: SystemAccounts::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DatasetReport {
    pub files: Vec<WriteReport>,
    pub anomalies: u64,
    pub duration_ms: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ExtractReport {
    pub datasets: BTreeMap<DatasetId, DatasetReport>,
    pub anomalies: WriteReport,
    pub duration_ms: u64,
}

impl ExtractReport {
    /// Row count of one output file, if it was written.
    pub fn rows(&self, file: &str) -> Option<u64> {
        self.datasets
            .values()
            .flat_map(|d| &d.files)
            .chain(std::iter::once(&self.anomalies))
            .find(|r| r.file == file)
            .map(|r| r.rows)
    }
}

/// Block number and timestamp only; the rest of the block is skipped.
#[derive(Debug, Deserialize, Serialize)]
struct BlockHeader {
    block_num: u64,
    timestamp: Timestamp,
}

impl ChainRecord for BlockHeader {
    const KIND: FileKind = FileKind::Blocks;

    fn block_num(&self) -> u64 {
        self.block_num
    }
}

struct AnomalyLog {
    strict: bool,
    items: Vec<Anomaly>,
}

impl AnomalyLog {
    fn record(&mut self, anomaly: Anomaly) -> Result<()> {
        if self.strict {
            return Err(Error::Strict(anomaly));
        }
        log::debug!("anomaly: {anomaly}");
        self.items.push(anomaly);
        Ok(())
    }
}

struct Ctx<'a> {
    fileset: &'a RawFileSet,
    opts: &'a ExtractOptions,
}

impl Ctx<'_> {
    fn stream<T: ChainRecord>(&self) -> RecordStream<T> {
        read_stream(self.fileset, self.opts.range)
    }

    /// Visits every trace with the timestamp of its block. Traces whose block
    /// is not in the block files are reported as `trace_without_block`.
    fn for_each_trace(
        &self,
        log: &mut AnomalyLog,
        mut visit: impl FnMut(&ActionTrace, Timestamp, &mut AnomalyLog) -> Result<()>,
    ) -> Result<()> {
        let mut clock = Clock {
            headers: self.stream::<BlockHeader>().peekable(),
        };
        for trace in self.stream::<ActionTrace>() {
            let trace = trace?;
            match clock.timestamp(trace.block_num)? {
                Some(ts) => visit(&trace, ts, log)?,
                None => log.record(Anomaly::for_trace("trace_without_block", &trace))?,
            }
        }
        Ok(())
    }
}

struct Clock<I: Iterator<Item = Result<BlockHeader>>> {
    headers: Peekable<I>,
}

impl<I: Iterator<Item = Result<BlockHeader>>> Clock<I> {
    fn timestamp(&mut self, block_num: u64) -> Result<Option<Timestamp>> {
        loop {
            match self.headers.peek() {
                None => return Ok(None),
                Some(Err(_)) => return Err(self.headers.next().unwrap().unwrap_err()),
                Some(Ok(h)) if h.block_num < block_num => {
                    self.headers.next();
                }
                Some(Ok(h)) if h.block_num == block_num => return Ok(Some(h.timestamp)),
                Some(Ok(_)) => return Ok(None),
            }
        }
    }
}

fn simple_trace_dataset<R: crate::dataset::CsvRow>(
    ctx: &Ctx<'_>,
    log: &mut AnomalyLog,
    mut extract: impl FnMut(&ActionTrace, Timestamp) -> TraceOutcome<R>,
) -> Result<Vec<WriteReport>> {
    let mut out = DatasetWriter::<R>::create(&ctx.opts.output_dir)?;
    ctx.for_each_trace(log, |trace, ts, log| match extract(trace, ts) {
        Ok(Some(row)) => out.write(&row),
        Ok(None) => Ok(()),
        Err(anomaly) => log.record(anomaly),
    })?;
    Ok(vec![out.finish()?])
}

fn extract_d1(ctx: &Ctx<'_>, log: &mut AnomalyLog) -> Result<Vec<WriteReport>> {
    let dir = &ctx.opts.output_dir;
    let mut blocks_out = DatasetWriter::<D1BlockRow>::create(dir)?;
    let mut tx_out = DatasetWriter::<D1TransactionRow>::create(dir)?;
    let mut actions_out = DatasetWriter::<D1ActionRow>::create(dir)?;
    let mut receipts = ctx.stream::<TransactionReceipt>().peekable();
    let mut pending: Vec<TransactionReceipt> = Vec::new();

    for block in ctx.stream::<RawBlock>() {
        let block = block?;
        pending.clear();
        while let Some(next) = receipts.peek() {
            match next {
                Err(_) => return Err(receipts.next().unwrap().unwrap_err()),
                Ok(r) if r.block_num > block.block_num => break,
                Ok(_) => {
                    let r = receipts.next().unwrap()?;
                    if r.block_num == block.block_num {
                        pending.push(r);
                    } else {
                        log.record(unjoinable_receipt(&r))?;
                    }
                }
            }
        }
        let rows = extract_block(&block, &pending);
        if let Some(row) = &rows.block {
            blocks_out.write(row)?;
        }
        rows.transactions.iter().try_for_each(|r| tx_out.write(r))?;
        rows.actions.iter().try_for_each(|r| actions_out.write(r))?;
        rows.anomalies.into_iter().try_for_each(|a| log.record(a))?;
    }
    for r in receipts {
        log.record(unjoinable_receipt(&r?))?;
    }
    Ok(vec![blocks_out.finish()?, tx_out.finish()?, actions_out.finish()?])
}

fn extract_d5(ctx: &Ctx<'_>, log: &mut AnomalyLog) -> Result<Vec<WriteReport>> {
    let mut detector = TokenDetector::new(ctx.opts.system_accounts.clone());
    for trace in ctx.stream::<ActionTrace>() {
        if let Err(anomaly) = detector.push(&trace?) {
            log.record(anomaly)?;
        }
    }
    let token_set = detector.token_contracts();
    log::info!("detected {} token contracts", token_set.len());

    let dir = &ctx.opts.output_dir;
    let mut tokens_out = DatasetWriter::<D5TokenRow>::create(dir)?;
    let mut transfers_out = DatasetWriter::<D5TransferRow>::create(dir)?;
    let mut extractor = TokenExtractor::new(token_set);
    ctx.for_each_trace(log, |trace, ts, log| match extractor.push(trace, ts) {
        Ok(Some(D5Row::Token(row))) => tokens_out.write(&row),
        Ok(Some(D5Row::Transfer(row))) => transfers_out.write(&row),
        Ok(None) => Ok(()),
        Err(anomaly) => log.record(anomaly),
    })?;
    Ok(vec![tokens_out.finish()?, transfers_out.finish()?])
}

fn run_dataset(ctx: &Ctx<'_>, id: DatasetId) -> Result<(DatasetReport, Vec<Anomaly>)> {
    let started = Instant::now();
    let mut log = AnomalyLog {
        strict: ctx.opts.strict,
        items: Vec::new(),
    };
    let files = match id {
        DatasetId::D1 => extract_d1(ctx, &mut log)?,
        DatasetId::D2 => {
            let mut ex = TransferExtractor;
            simple_trace_dataset(ctx, &mut log, |t, ts| ex.push(t, ts))?
        }
        DatasetId::D3 => {
            let mut ex = ContractExtractor::default();
            simple_trace_dataset(ctx, &mut log, |t, ts| ex.push(t, ts))?
        }
        DatasetId::D4 => {
            let mut ex = InvocationExtractor::new(ctx.opts.system_accounts.clone());
            simple_trace_dataset(ctx, &mut log, |t, ts| ex.push(t, ts))?
        }
        DatasetId::D5 => extract_d5(ctx, &mut log)?,
        DatasetId::D6 => {
            let mut ex = AccountExtractor::default();
            simple_trace_dataset(ctx, &mut log, |t, ts| ex.push(t, ts))?
        }
        DatasetId::D7 => {
            let mut ex = ResourceExtractor;
            simple_trace_dataset(ctx, &mut log, |t, ts| ex.push(t, ts))?
        }
    };
    let report = DatasetReport {
        files,
        anomalies: log.items.len() as u64,
        duration_ms: started.elapsed().as_millis() as u64,
    };
    log::info!("{id}: {} rows, {} anomalies", report.files.iter().map(|f| f.rows).sum::<u64>(), report.anomalies);
    Ok((report, log.items))
}

/// Runs the selected extractors in parallel and writes their datasets plus
/// `anomalies.csv` into the output directory.
pub fn extract(opts: &ExtractOptions) -> Result<ExtractReport> {
    if opts.datasets.is_empty() {
        return Err(Error::Config("no datasets selected".into()));
    }
    let started = Instant::now();
    let fileset = RawFileSet::open(&opts.input_dir, opts.allow_gaps)?;
    if fileset.is_empty() {
        return Err(Error::Empty(format!("no raw files in {}", opts.input_dir.display())));
    }
    fs::create_dir_all(&opts.output_dir).map_err(|e| Error::io(&opts.output_dir, e))?;
    let ctx = Ctx { fileset: &fileset, opts };

    let results: Vec<(DatasetId, Result<(DatasetReport, Vec<Anomaly>)>)> = std::thread::scope(|scope| {
        let handles: Vec<_> = opts
            .datasets
            .iter()
            .map(|&id| {
                let ctx = &ctx;
                (id, scope.spawn(move || run_dataset(ctx, id)))
            })
            .collect();
        handles
            .into_iter()
            .map(|(id, h)| (id, h.join().expect("extractor thread panicked")))
            .collect()
    });

    let mut datasets = BTreeMap::new();
    let mut anomalies_out = DatasetWriter::<Anomaly>::create(&opts.output_dir)?;
    let mut first_error = None;
    for (id, result) in results {
        match result {
            Ok((report, anomalies)) => {
                anomalies.iter().try_for_each(|a| anomalies_out.write(a))?;
                datasets.insert(id, report);
            }
            Err(e) => {
                log::error!("{id}: {e}");
                first_error.get_or_insert(e);
            }
        }
    }
    let anomalies = anomalies_out.finish()?;
    if let Some(e) = first_error {
        return Err(e);
    }
    Ok(ExtractReport {
        datasets,
        anomalies,
        duration_ms: started.elapsed().as_millis() as u64,
    })
}
