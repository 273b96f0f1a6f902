use std::fs::{self, File};
use std::io::Write;
use std::time::Instant;

use serde::Serialize;

use super::fileset::range_file_name;
use super::{BlockRange, ChainRecord, Collector, CollectorConfig};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BenchReport {
    pub records: u64,
    pub buffered_secs: f64,
    pub synchronous_secs: f64,
    pub buffered_rps: f64,
    pub synchronous_rps: f64,
}

impl BenchReport {
    /// Buffered over synchronous throughput; `None` for an empty workload.
    pub fn speedup(&self) -> Option<f64> {
        (self.synchronous_rps > 0.0).then(|| self.buffered_rps / self.synchronous_rps)
    }
}

fn rate(records: u64, secs: f64) -> f64 {
    if records == 0 || secs <= 0.0 {
        0.0
    } else {
        records as f64 / secs
    }
}

/// Writes `workload` twice: through the buffered collector, and through a
/// baseline that serializes, writes and syncs each record before taking the
/// next. Output goes to `buffered/` and `synchronous/` under
/// `config.output_dir`.
pub fn bench_writers<T: ChainRecord + Clone>(workload: &[T], config: &CollectorConfig) -> Result<BenchReport> {
    let records = workload.len() as u64;
    if records == 0 {
        return Ok(BenchReport {
            records,
            buffered_secs: 0.0,
            synchronous_secs: 0.0,
            buffered_rps: 0.0,
            synchronous_rps: 0.0,
        });
    }

    let buffered_dir = config.output_dir.join("buffered");
    let collector = Collector::<T>::start(CollectorConfig {
        output_dir: buffered_dir,
        ..config.clone()
    })?;
    let started = Instant::now();
    for record in workload {
        collector.submit(record.clone())?;
    }
    collector.close()?;
    let buffered_secs = started.elapsed().as_secs_f64();

    let sync_dir = config.output_dir.join("synchronous");
    fs::create_dir_all(&sync_dir).map_err(|e| Error::io(&sync_dir, e))?;
    let range = BlockRange {
        start: workload[0].block_num(),
        end: workload[workload.len() - 1].block_num(),
    };
    let path = sync_dir.join(range_file_name(T::KIND, range));
    let started = Instant::now();
    let mut file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut line = Vec::with_capacity(1024);
    for record in workload {
        line.clear();
        serde_json::to_writer(&mut line, record).expect("chain records serialize");
        line.push(b'\n');
        file.write_all(&line)
            .and_then(|_| file.sync_data())
            .map_err(|e| Error::io(&path, e))?;
    }
    drop(file);
    let synchronous_secs = started.elapsed().as_secs_f64();

    Ok(BenchReport {
        records,
        buffered_secs,
        synchronous_secs,
        buffered_rps: rate(records, buffered_secs),
        synchronous_rps: rate(records, synchronous_secs),
    })
}
