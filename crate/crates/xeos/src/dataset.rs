//! CSV dataset files: fixed file names and column orders, RFC 4180 quoting,
//! UTF-8 with LF line endings. A header row is written even when a dataset
//! has no rows.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::marker::PhantomData;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use xeos_core::etl::*;

use crate::error::{Error, Result};

/// A row type stored in its own CSV file.
pub trait CsvRow: Serialize + DeserializeOwned {
    const FILE: &'static str;
    const HEADER: &'static [&'static str];
}

macro_rules! csv_row {
    ($ty:ty, $file:literal, [$($col:literal),+ $(,)?]) => {
        impl CsvRow for $ty {
            const FILE: &'static str = $file;
            const HEADER: &'static [&'static str] = &[$($col),+];
        }
    };
}

csv_row!(D1BlockRow, "d1_blocks.csv", ["block_num", "block_id", "timestamp", "producer", "tx_count"]);
csv_row!(
    D1TransactionRow,
    "d1_transactions.csv",
    ["tx_id", "block_num", "is_deferred", "status", "cpu_usage_us", "net_usage_words"]
);
csv_row!(
    D1ActionRow,
    "d1_actions.csv",
    ["tx_id", "action_index", "contract", "function", "authorizers", "data"]
);
csv_row!(
    D2Record,
    "d2_transfers.csv",
    ["block_num", "timestamp", "tx_id", "from", "to", "amount", "memo", "kind"]
);
csv_row!(
    D3Record,
    "d3_contracts.csv",
    ["account", "block_num", "timestamp", "action_kind", "code_hash", "code_size_bytes", "is_first_deploy"]
);
csv_row!(
    D4Record,
    "d4_invocations.csv",
    ["block_num", "timestamp", "tx_id", "authorizer", "contract", "function", "has_error", "error_text"]
);
csv_row!(
    D5TokenRow,
    "d5_tokens.csv",
    ["contract", "symbol", "precision", "created_at", "issuer", "max_supply_units"]
);
csv_row!(
    D5TransferRow,
    "d5_token_transfers.csv",
    ["block_num", "timestamp", "contract", "symbol", "from", "to", "amount_units", "memo"]
);
csv_row!(D6Record, "d6_accounts.csv", ["block_num", "timestamp", "creator", "new_account"]);
csv_row!(
    D7Record,
    "d7_resources.csv",
    ["block_num", "timestamp", "actor", "category", "action", "eos_amount"]
);
csv_row!(Anomaly, "anomalies.csv", ["reason", "block_num", "tx_id", "global_seq"]);

pub const ANOMALIES_FILE: &str = "anomalies.csv";

/// Files written for a dataset.
pub fn dataset_files(id: DatasetId) -> &'static [&'static str] {
    match id {
        DatasetId::D1 => &[D1BlockRow::FILE, D1TransactionRow::FILE, D1ActionRow::FILE],
        DatasetId::D2 => &[D2Record::FILE],
        DatasetId::D3 => &[D3Record::FILE],
        DatasetId::D4 => &[D4Record::FILE],
        DatasetId::D5 => &[D5TokenRow::FILE, D5TransferRow::FILE],
        DatasetId::D6 => &[D6Record::FILE],
        DatasetId::D7 => &[D7Record::FILE],
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WriteReport {
    pub file: String,
    pub rows: u64,
    pub bytes: u64,
}

/// Byte counter under the CSV writer.
struct Counting<W> {
    inner: W,
    bytes: u64,
}

impl<W: Write> Write for Counting<W> {
    fn write(&mut self, buf: &[u8]) -> std::io::Result<usize> {
        let n = self.inner.write(buf)?;
        self.bytes += n as u64;
        Ok(n)
    }

    fn flush(&mut self) -> std::io::Result<()> {
        self.inner.flush()
    }
}

pub struct DatasetWriter<T> {
    path: PathBuf,
    writer: csv::Writer<Counting<BufWriter<File>>>,
    rows: u64,
    _marker: PhantomData<fn(&T)>,
}

impl<T: CsvRow> DatasetWriter<T> {
    pub fn create(dir: impl AsRef<Path>) -> Result<Self> {
        let path = dir.as_ref().join(T::FILE);
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut writer = csv::WriterBuilder::new()
            .has_headers(false)
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Counting {
                inner: BufWriter::new(file),
                bytes: 0,
            });
        writer.write_record(T::HEADER).map_err(|e| csv_error(&path, e))?;
        Ok(Self {
            path,
            writer,
            rows: 0,
            _marker: PhantomData,
        })
    }

    pub fn write(&mut self, row: &T) -> Result<()> {
        self.writer.serialize(row).map_err(|e| csv_error(&self.path, e))?;
        self.rows += 1;
        Ok(())
    }

    pub fn rows(&self) -> u64 {
        self.rows
    }

    pub fn finish(mut self) -> Result<WriteReport> {
        self.writer.flush().map_err(|e| Error::io(&self.path, e))?;
        let inner = self
            .writer
            .into_inner()
            .map_err(|e| Error::io(&self.path, e.into_error()))?;
        Ok(WriteReport {
            file: T::FILE.to_string(),
            rows: self.rows,
            bytes: inner.bytes,
        })
    }
}

/// Writes a whole stream of rows to `dir/T::FILE`.
pub fn write_dataset<'a, T: CsvRow + 'a>(rows: impl IntoIterator<Item = &'a T>, dir: impl AsRef<Path>) -> Result<WriteReport> {
    let mut writer = DatasetWriter::create(dir)?;
    for row in rows {
        writer.write(row)?;
    }
    writer.finish()
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::Parse {
            path: path.to_path_buf(),
            line,
            message: format!("{other:?}"),
        },
    }
}

/// Streams the rows of a dataset file with their line numbers. The header
/// must match the dataset's column order.
pub fn read_dataset<T: CsvRow>(path: impl AsRef<Path>) -> Result<impl Iterator<Item = Result<(u64, T)>>> {
    let path = path.as_ref().to_path_buf();
    let file = File::open(&path).map_err(|e| Error::io(&path, e))?;
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(BufReader::new(file));
    let header = reader.headers().map_err(|e| csv_error(&path, e))?.clone();
    if header.iter().ne(T::HEADER.iter().copied()) {
        return Err(Error::Parse {
            path,
            line: 1,
            message: format!("header {:?} does not match {:?}", header.iter().collect::<Vec<_>>(), T::HEADER),
        });
    }
    let mut record = csv::StringRecord::new();
    Ok(std::iter::from_fn(move || loop {
        match reader.read_record(&mut record) {
            Ok(false) => return None,
            Ok(true) => {
                let line = record.position().map_or(0, |p| p.line());
                return Some(
                    record
                        .deserialize::<T>(Some(&header))
                        .map(|row| (line, row))
                        .map_err(|e| Error::Parse {
                            path: path.clone(),
                            line,
                            message: deserialize_message(e),
                        }),
                );
            }
            Err(e) => return Some(Err(csv_error(&path, e))),
        }
    }))
}

fn deserialize_message(e: csv::Error) -> String {
    match e.into_kind() {
        csv::ErrorKind::Deserialize { err, .. } => match err.field() {
            Some(field) => format!("column {}: {}", field + 1, err.kind()),
            None => err.kind().to_string(),
        },
        other => format!("{other:?}"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use xeos_core::{AccountName, Digest, EosAmount, Timestamp};

    fn transfer(memo: &str) -> D2Record {
        D2Record {
            block_num: 3,
            timestamp: Timestamp::from_millis(1_528_445_288_500),
            tx_id: Digest::from_bytes(&[0xab; 32]),
            from: AccountName::new("alice").unwrap(),
            to: AccountName::new("bob").unwrap(),
            amount: EosAmount::from_units(12_345),
            memo: memo.into(),
            kind: TransferKind::External,
        }
    }

    #[test]
    fn empty_stream_writes_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let report = write_dataset::<D6Record>([], dir.path()).unwrap();
        assert_eq!(report.rows, 0);
        let text = std::fs::read_to_string(dir.path().join("d6_accounts.csv")).unwrap();
        assert_eq!(text, "block_num,timestamp,creator,new_account\n");
        assert_eq!(report.bytes, text.len() as u64);
    }

    #[test]
    fn quoting_and_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let row = transfer("win, \"big\"\nnext");
        write_dataset([&row], dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("d2_transfers.csv")).unwrap();
        let expected = format!(
            "block_num,timestamp,tx_id,from,to,amount,memo,kind\n3,2018-06-08T08:08:08.500Z,{},alice,bob,1.2345 EOS,\"win, \"\"big\"\"\nnext\",external\n",
            "ab".repeat(32)
        );
        assert_eq!(text, expected);
        let back: Vec<D2Record> = read_dataset(dir.path().join("d2_transfers.csv"))
            .unwrap()
            .map(|r| r.unwrap().1)
            .collect();
        assert_eq!(back, vec![row]);
    }

    #[test]
    fn headers_match_serde_field_order() {
        fn check<T: CsvRow>(row: &T) {
            let mut w = csv::WriterBuilder::new().has_headers(true).from_writer(vec![]);
            w.serialize(row).unwrap();
            let out = String::from_utf8(w.into_inner().unwrap()).unwrap();
            assert_eq!(out.lines().next().unwrap(), T::HEADER.join(","), "{}", T::FILE);
        }
        check(&transfer("m"));
        check(&Anomaly {
            reason: "x".into(),
            block_num: 1,
            tx_id: None,
            global_seq: None,
        });
        check(&D6Record {
            block_num: 1,
            timestamp: Timestamp::from_millis(0),
            creator: AccountName::new("a").unwrap(),
            new_account: AccountName::new("b").unwrap(),
        });
        check(&D7Record {
            block_num: 1,
            timestamp: Timestamp::from_millis(0),
            actor: AccountName::new("a").unwrap(),
            category: ResourceCategory::Cpu,
            action: ResourceAction::StakeCpu,
            eos_amount: EosAmount::from_units(1),
        });
    }

    #[test]
    fn bad_cells_report_line_and_column() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d6_accounts.csv");
        std::fs::write(
            &path,
            "block_num,timestamp,creator,new_account\n1,2018-06-08T08:08:08.500Z,alice,bob\n2,2018-06-08T08:08:09.000Z,Alice,bob\n",
        )
        .unwrap();
        let rows: Vec<_> = read_dataset::<D6Record>(&path).unwrap().collect();
        assert!(rows[0].is_ok());
        match &rows[1] {
            Err(Error::Parse { line, message, .. }) => {
                assert_eq!(*line, 3);
                assert!(message.contains("Alice"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
    }
}
