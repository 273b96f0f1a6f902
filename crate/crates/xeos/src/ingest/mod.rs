//! Raw JSON-lines files: block-range file sets, streaming readers, and the
//! buffered trace collector that writes them.

mod bench;
mod collector;
mod fileset;
mod range_writer;
mod reader;

use std::fmt;

use serde::de::DeserializeOwned;
use serde::Serialize;
use xeos_core::{ActionTrace, ModelError, RawBlock, TransactionReceipt};

pub use bench::{bench_writers, BenchReport};
pub use collector::{Collector, CollectorConfig, FlushReport};
pub use fileset::{BlockRange, RawFileSet, RangeFile};
pub use range_writer::RangeFileWriter;
pub use reader::{read_stream, RecordStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FileKind {
    Blocks,
    Traces,
    Receipts,
}

impl FileKind {
    pub const ALL: [FileKind; 3] = [FileKind::Blocks, FileKind::Traces, FileKind::Receipts];

    pub fn prefix(self) -> &'static str {
        match self {
            FileKind::Blocks => "blocks",
            FileKind::Traces => "traces",
            FileKind::Receipts => "receipts",
        }
    }
}

impl fmt::Display for FileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.prefix())
    }
}

/// A record stored in one of the raw file families.
pub trait ChainRecord: Serialize + DeserializeOwned + Send + 'static {
    const KIND: FileKind;

    fn block_num(&self) -> u64;

    /// Structural invariants checked on ingest.
    fn check(&self) -> Result<(), ModelError> {
        Ok(())
    }
}

impl ChainRecord for RawBlock {
    const KIND: FileKind = FileKind::Blocks;

    fn block_num(&self) -> u64 {
        self.block_num
    }

    fn check(&self) -> Result<(), ModelError> {
        RawBlock::check(self)
    }
}

impl ChainRecord for ActionTrace {
    const KIND: FileKind = FileKind::Traces;

    fn block_num(&self) -> u64 {
        self.block_num
    }

    fn check(&self) -> Result<(), ModelError> {
        ActionTrace::check(self)
    }
}

impl ChainRecord for TransactionReceipt {
    const KIND: FileKind = FileKind::Receipts;

    fn block_num(&self) -> u64 {
        self.block_num
    }
}
