use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::fileset::range_file_name;
use super::{BlockRange, ChainRecord};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct FlushReport {
    pub records_written: u64,
    pub files_written: u64,
    pub bytes_written: u64,
}

struct OpenFile {
    part_path: PathBuf,
    writer: BufWriter<File>,
    start: u64,
    last_block: u64,
    records: u64,
}

/// Writes records of one family as JSON lines into files named by the block
/// range they cover.
///
/// A file is rolled once it holds `records_per_file` records and the next
/// record starts a new block, so a block never spans two files. A closed file
/// covers every block up to the one before the next file starts. Files are
/// written under a hidden `.part` name and renamed when complete.
pub struct RangeFileWriter<T> {
    dir: PathBuf,
    records_per_file: u64,
    current: Option<OpenFile>,
    report: FlushReport,
    last_block: Option<u64>,
    first_start: Option<u64>,
    buf: Vec<u8>,
    _marker: PhantomData<fn(&T)>,
}

impl<T: ChainRecord> RangeFileWriter<T> {
    pub fn new(dir: impl AsRef<Path>, records_per_file: u64) -> Result<Self> {
        if records_per_file == 0 {
            return Err(Error::Config("records_per_file must be at least 1".into()));
        }
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self {
            dir,
            records_per_file,
            current: None,
            report: FlushReport::default(),
            last_block: None,
            first_start: None,
            buf: Vec::with_capacity(1024),
            _marker: PhantomData,
        })
    }

    /// Lets the first file's range begin at `block` even if its first
    /// record comes later.
    pub fn starting_at(mut self, block: u64) -> Self {
        self.first_start = Some(block);
        self
    }

    pub fn report(&self) -> FlushReport {
        self.report
    }

    pub fn write(&mut self, record: &T) -> Result<()> {
        let block = record.block_num();
        if let Some(last) = self.last_block {
            if block < last {
                return Err(Error::OutOfOrder { last, got: block });
            }
        }
        if let Some(cur) = &self.current {
            if cur.records >= self.records_per_file && block != cur.last_block {
                self.close_current(block - 1)?;
            }
        }
        if self.current.is_none() {
            let start = self.first_start.take().map_or(block, |s| s.min(block));
            self.open(start)?;
        }
        self.buf.clear();
        serde_json::to_writer(&mut self.buf, record).expect("chain records serialize");
        self.buf.push(b'\n');
        let cur = self.current.as_mut().expect("file is open");
        if let Err(e) = cur.writer.write_all(&self.buf) {
            return Err(self.abort(e));
        }
        cur.records += 1;
        cur.last_block = block;
        self.last_block = Some(block);
        self.report.records_written += 1;
        self.report.bytes_written += self.buf.len() as u64;
        Ok(())
    }

    /// Flushes buffered bytes of the open file to the storage device.
    pub fn sync(&mut self) -> Result<()> {
        let Some(cur) = self.current.as_mut() else {
            return Ok(());
        };
        let res = cur.writer.flush().and_then(|_| cur.writer.get_ref().sync_data());
        res.map_err(|e| self.abort(e))
    }

    /// Closes the open file. `end_block` extends its range past the last
    /// record, e.g. to cover trailing blocks without records.
    pub fn finish(mut self, end_block: Option<u64>) -> Result<FlushReport> {
        if let Some(cur) = &self.current {
            let end = end_block.map_or(cur.last_block, |e| e.max(cur.last_block));
            self.close_current(end)?;
        }
        Ok(self.report)
    }

    fn open(&mut self, start: u64) -> Result<()> {
        let part_path = self.dir.join(format!(".{}_{}-open.jsonl.part", T::KIND.prefix(), start));
        let file = File::create(&part_path).map_err(|e| Error::io(&part_path, e))?;
        self.current = Some(OpenFile {
            part_path,
            writer: BufWriter::with_capacity(1 << 16, file),
            start,
            last_block: start,
            records: 0,
        });
        Ok(())
    }

    fn close_current(&mut self, end: u64) -> Result<()> {
        let Some(mut cur) = self.current.take() else {
            return Ok(());
        };
        let range = BlockRange { start: cur.start, end };
        let final_path = self.dir.join(range_file_name(T::KIND, range));
        let res = cur
            .writer
            .flush()
            .and_then(|_| cur.writer.get_ref().sync_data())
            .and_then(|_| fs::rename(&cur.part_path, &final_path));
        if let Err(e) = res {
            let _ = fs::remove_file(&cur.part_path);
            return Err(Error::io(&final_path, e));
        }
        self.report.files_written += 1;
        Ok(())
    }

    /// Drops the partial file after a write failure.
    fn abort(&mut self, e: std::io::Error) -> Error {
        match self.current.take() {
            Some(cur) => {
                let path = cur.part_path.clone();
                drop(cur);
                let _ = fs::remove_file(&path);
                Error::io(path, e)
            }
            None => Error::io(&self.dir, e),
        }
    }
}

impl<T> Drop for RangeFileWriter<T> {
    fn drop(&mut self) {
        // an unfinished file is incomplete; never leave it behind
        if let Some(cur) = self.current.take() {
            let path = cur.part_path.clone();
            drop(cur);
            let _ = fs::remove_file(path);
        }
    }
}
