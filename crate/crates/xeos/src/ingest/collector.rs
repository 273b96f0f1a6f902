//! Buffered trace collector.
//!
//! Producers (a replaying node, a reader) hand records to a bounded in-memory
//! buffer; a dedicated thread drains it, serializes the records and writes
//! them to block-range files, syncing to storage every `flush_interval` and
//! at close. A full buffer blocks the producer; records are never dropped.

use std::collections::VecDeque;
use std::path::PathBuf;
use std::sync::{Condvar, Mutex, MutexGuard};
use std::thread::{self, JoinHandle};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{ChainRecord, RangeFileWriter};
use crate::error::{Error, Result};

pub use super::range_writer::FlushReport;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CollectorConfig {
    /// Maximum number of records held in memory, including the batch being
    /// written.
    pub buffer_capacity: usize,
    #[serde(with = "millis")]
    pub flush_interval: Duration,
    pub records_per_file: u64,
    pub output_dir: PathBuf,
}

impl Default for CollectorConfig {
    fn default() -> Self {
        Self {
            buffer_capacity: 1024,
            flush_interval: Duration::from_secs(1),
            records_per_file: 100_000,
            output_dir: PathBuf::from("."),
        }
    }
}

mod millis {
    use std::time::Duration;

    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_u64(d.as_millis() as u64)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Duration, D::Error> {
        u64::deserialize(d).map(Duration::from_millis)
    }
}

struct State<T> {
    queue: VecDeque<T>,
    in_flight: usize,
    closed: bool,
    high_water: usize,
    last_block: Option<u64>,
}

struct Shared<T> {
    state: Mutex<State<T>>,
    not_empty: Condvar,
    not_full: Condvar,
    capacity: usize,
}

impl<T> Shared<T> {
    fn lock(&self) -> MutexGuard<'_, State<T>> {
        self.state.lock().unwrap_or_else(|p| p.into_inner())
    }
}

pub struct Collector<T: ChainRecord> {
    shared: std::sync::Arc<Shared<T>>,
    worker: Mutex<Option<JoinHandle<Result<FlushReport>>>>,
    report: Mutex<Option<FlushReport>>,
}

impl<T: ChainRecord> Collector<T> {
    pub fn start(config: CollectorConfig) -> Result<Self> {
        if config.buffer_capacity == 0 {
            return Err(Error::Config("buffer_capacity must be at least 1".into()));
        }
        let writer = RangeFileWriter::<T>::new(&config.output_dir, config.records_per_file)?;
        let shared = std::sync::Arc::new(Shared {
            state: Mutex::new(State {
                queue: VecDeque::with_capacity(config.buffer_capacity),
                in_flight: 0,
                closed: false,
                high_water: 0,
                last_block: None,
            }),
            not_empty: Condvar::new(),
            not_full: Condvar::new(),
            capacity: config.buffer_capacity,
        });
        let worker_shared = shared.clone();
        let flush_interval = config.flush_interval;
        let handle = thread::Builder::new()
            .name(format!("{}-collector", T::KIND))
            .spawn(move || drain(worker_shared, writer, flush_interval))
            .map_err(|e| Error::io(&config.output_dir, e))?;
        Ok(Self {
            shared,
            worker: Mutex::new(Some(handle)),
            report: Mutex::new(None),
        })
    }

    /// Enqueues a record, blocking while the buffer is full. Records must
    /// arrive in non-decreasing block order.
    pub fn submit(&self, record: T) -> Result<()> {
        let mut state = self.shared.lock();
        loop {
            if state.closed {
                return Err(Error::CollectorClosed);
            }
            if state.queue.len() + state.in_flight < self.shared.capacity {
                break;
            }
            state = self.shared.not_full.wait(state).unwrap_or_else(|p| p.into_inner());
        }
        let block = record.block_num();
        if let Some(last) = state.last_block {
            if block < last {
                return Err(Error::OutOfOrder { last, got: block });
            }
        }
        state.last_block = Some(block);
        state.queue.push_back(record);
        let buffered = state.queue.len() + state.in_flight;
        state.high_water = state.high_water.max(buffered);
        drop(state);
        self.shared.not_empty.notify_one();
        Ok(())
    }

    /// Largest number of records ever held in memory at once.
    pub fn high_water_mark(&self) -> usize {
        self.shared.lock().high_water
    }

    /// Writes out everything buffered and stops the worker. Calling it again
    /// returns the same report.
    pub fn close(&self) -> Result<FlushReport> {
        let mut cached = self.report.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(report) = *cached {
            return Ok(report);
        }
        {
            let mut state = self.shared.lock();
            state.closed = true;
        }
        self.shared.not_empty.notify_all();
        self.shared.not_full.notify_all();
        let handle = self.worker.lock().unwrap_or_else(|p| p.into_inner()).take();
        let Some(handle) = handle else {
            return Err(Error::CollectorClosed);
        };
        let report = handle.join().expect("collector worker panicked")?;
        *cached = Some(report);
        Ok(report)
    }
}

impl<T: ChainRecord> Drop for Collector<T> {
    fn drop(&mut self) {
        if let Err(e) = self.close() {
            log::error!("closing {} collector: {e}", T::KIND);
        }
    }
}

fn drain<T: ChainRecord>(
    shared: std::sync::Arc<Shared<T>>,
    mut writer: RangeFileWriter<T>,
    flush_interval: Duration,
) -> Result<FlushReport> {
    // write in halves so producers can refill while a batch is on its way out
    let batch_limit = (shared.capacity / 2).max(1);
    let mut batch = Vec::with_capacity(batch_limit);
    let mut last_sync = Instant::now();
    let mut dirty = false;
    loop {
        let mut state = shared.lock();
        while state.queue.is_empty() && !state.closed {
            let wait = flush_interval.saturating_sub(last_sync.elapsed());
            if dirty && wait.is_zero() {
                break;
            }
            let (s, _) = shared
                .not_empty
                .wait_timeout(state, wait.max(Duration::from_millis(1)))
                .unwrap_or_else(|p| p.into_inner());
            state = s;
        }
        if state.queue.is_empty() && state.closed {
            drop(state);
            return writer.finish(None);
        }
        let take = state.queue.len().min(batch_limit);
        batch.extend(state.queue.drain(..take));
        state.in_flight = batch.len();
        drop(state);

        let mut result = batch.iter().try_for_each(|r| writer.write(r));
        if !batch.is_empty() {
            dirty = true;
        }
        batch.clear();
        if result.is_ok() && dirty && last_sync.elapsed() >= flush_interval {
            result = writer.sync();
            last_sync = Instant::now();
            dirty = false;
        }

        let mut state = shared.lock();
        state.in_flight = 0;
        if result.is_err() {
            state.closed = true;
            state.queue.clear();
        }
        drop(state);
        shared.not_full.notify_all();
        result?;
    }
}
