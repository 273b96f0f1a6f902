use std::fs::File;
use std::io::{BufRead, BufReader};
use std::marker::PhantomData;
use std::path::PathBuf;

use super::{BlockRange, ChainRecord, RawFileSet, RangeFile};
use crate::error::{Error, Result};

/// Streams the records of one family in block order, one line at a time.
///
/// Errors carry file and line coordinates. The stream ends after the first
/// error.
pub struct RecordStream<T> {
    files: std::vec::IntoIter<RangeFile>,
    current: Option<(BufReader<File>, RangeFile, u64)>,
    filter: Option<BlockRange>,
    last_block: u64,
    line: String,
    failed: bool,
    _marker: PhantomData<T>,
}

/// Opens a stream over every `T::KIND` file of `fileset`, optionally
/// restricted to `range`.
pub fn read_stream<T: ChainRecord>(fileset: &RawFileSet, range: Option<BlockRange>) -> RecordStream<T> {
    let files: Vec<RangeFile> = fileset
        .files(T::KIND)
        .iter()
        .filter(|f| range.is_none_or(|r| r.overlaps(&f.range)))
        .cloned()
        .collect();
    RecordStream {
        files: files.into_iter(),
        current: None,
        filter: range,
        last_block: 0,
        line: String::new(),
        failed: false,
        _marker: PhantomData,
    }
}

impl<T: ChainRecord> RecordStream<T> {
    fn parse_error(path: PathBuf, line: u64, message: impl Into<String>) -> Error {
        Error::Parse {
            path,
            line,
            message: message.into(),
        }
    }

    fn next_record(&mut self) -> Option<Result<T>> {
        loop {
            if self.current.is_none() {
                let file = self.files.next()?;
                match File::open(&file.path) {
                    Ok(f) => self.current = Some((BufReader::new(f), file, 0)),
                    Err(e) => return Some(Err(Error::io(&file.path, e))),
                }
            }
            let (reader, file, line_no) = self.current.as_mut().expect("file is open");
            self.line.clear();
            match reader.read_line(&mut self.line) {
                Ok(0) => {
                    self.current = None;
                    continue;
                }
                Ok(_) => {}
                Err(e) => return Some(Err(Error::io(&file.path, e))),
            }
            *line_no += 1;
            let text = self.line.trim_end_matches(['\n', '\r']);
            if text.is_empty() {
                continue;
            }
            let record: T = match serde_json::from_str(text) {
                Ok(r) => r,
                Err(e) => return Some(Err(Self::parse_error(file.path.clone(), *line_no, e.to_string()))),
            };
            if let Err(e) = record.check() {
                return Some(Err(Self::parse_error(file.path.clone(), *line_no, e.to_string())));
            }
            let block = record.block_num();
            if !file.range.contains(block) {
                return Some(Err(Self::parse_error(
                    file.path.clone(),
                    *line_no,
                    format!("block {block} outside the file range {}", file.range),
                )));
            }
            if block < self.last_block {
                return Some(Err(Self::parse_error(
                    file.path.clone(),
                    *line_no,
                    format!("block {block} after block {}", self.last_block),
                )));
            }
            self.last_block = block;
            if self.filter.is_some_and(|r| !r.contains(block)) {
                continue;
            }
            return Some(Ok(record));
        }
    }
}

impl<T: ChainRecord> Iterator for RecordStream<T> {
    type Item = Result<T>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.failed {
            return None;
        }
        let item = self.next_record();
        if matches!(item, Some(Err(_))) {
            self.failed = true;
        }
        item
    }
}
