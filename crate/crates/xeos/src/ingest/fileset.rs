use std::fs;
use std::path::{Path, PathBuf};

use super::FileKind;
use crate::error::{Error, Result};

/// Inclusive block range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BlockRange {
    pub start: u64,
    pub end: u64,
}

impl BlockRange {
    pub fn new(start: u64, end: u64) -> Result<Self> {
        if start > end {
            return Err(Error::Config(format!("block range {start}-{end} is not ordered")));
        }
        Ok(Self { start, end })
    }

    pub fn contains(&self, block_num: u64) -> bool {
        (self.start..=self.end).contains(&block_num)
    }

    pub fn overlaps(&self, other: &BlockRange) -> bool {
        self.start <= other.end && other.start <= self.end
    }

    pub fn len(&self) -> u64 {
        self.end - self.start + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl std::str::FromStr for BlockRange {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("block range {s:?} is not START-END"));
        let (a, b) = s.split_once('-').ok_or_else(bad)?;
        BlockRange::new(a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?)
    }
}

impl std::fmt::Display for BlockRange {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}-{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RangeFile {
    pub path: PathBuf,
    pub range: BlockRange,
}

/// Name of the file holding `kind` records for `range`.
pub fn range_file_name(kind: FileKind, range: BlockRange) -> String {
    format!("{}_{}-{}.jsonl", kind.prefix(), range.start, range.end)
}

fn parse_file_name(name: &str) -> Option<(FileKind, BlockRange)> {
    let stem = name.strip_suffix(".jsonl")?;
    let (prefix, range) = stem.split_once('_')?;
    let kind = FileKind::ALL.into_iter().find(|k| k.prefix() == prefix)?;
    let (a, b) = range.split_once('-')?;
    let (start, end) = (a.parse().ok()?, b.parse().ok()?);
    (start <= end).then_some((kind, BlockRange { start, end }))
}

/// The raw files of a directory, grouped by family and sorted by start block.
/// Files whose names do not follow `<kind>_<start>-<end>.jsonl` are ignored.
#[derive(Debug, Clone, Default)]
pub struct RawFileSet {
    dir: PathBuf,
    blocks: Vec<RangeFile>,
    traces: Vec<RangeFile>,
    receipts: Vec<RangeFile>,
}

impl RawFileSet {
    /// Scans `dir`. Ranges within a family must be disjoint; unless
    /// `allow_gaps` is set they must also be contiguous.
    pub fn open(dir: impl AsRef<Path>, allow_gaps: bool) -> Result<Self> {
        let dir = dir.as_ref();
        let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
        let mut set = RawFileSet {
            dir: dir.to_path_buf(),
            ..Default::default()
        };
        for entry in entries {
            let entry = entry.map_err(|e| Error::io(dir, e))?;
            let name = entry.file_name();
            let Some((kind, range)) = name.to_str().and_then(parse_file_name) else {
                continue;
            };
            set.family_mut(kind).push(RangeFile {
                path: entry.path(),
                range,
            });
        }
        for kind in FileKind::ALL {
            let files = set.family_mut(kind);
            files.sort_by_key(|f| f.range);
            for pair in files.windows(2) {
                let (a, b) = (&pair[0], &pair[1]);
                if a.range.overlaps(&b.range) {
                    return Err(Error::Range(format!(
                        "{kind} files {} and {} overlap",
                        a.path.display(),
                        b.path.display()
                    )));
                }
                if !allow_gaps && a.range.end + 1 != b.range.start {
                    return Err(Error::Range(format!(
                        "{kind} files leave a gap between blocks {} and {}",
                        a.range.end, b.range.start
                    )));
                }
            }
        }
        Ok(set)
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn files(&self, kind: FileKind) -> &[RangeFile] {
        match kind {
            FileKind::Blocks => &self.blocks,
            FileKind::Traces => &self.traces,
            FileKind::Receipts => &self.receipts,
        }
    }

    fn family_mut(&mut self, kind: FileKind) -> &mut Vec<RangeFile> {
        match kind {
            FileKind::Blocks => &mut self.blocks,
            FileKind::Traces => &mut self.traces,
            FileKind::Receipts => &mut self.receipts,
        }
    }

    /// Overall range of a family, if it has files.
    pub fn span(&self, kind: FileKind) -> Option<BlockRange> {
        let files = self.files(kind);
        Some(BlockRange {
            start: files.first()?.range.start,
            end: files.last()?.range.end,
        })
    }

    pub fn is_empty(&self) -> bool {
        FileKind::ALL.iter().all(|k| self.files(*k).is_empty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn touch(dir: &Path, name: &str) {
        fs::write(dir.join(name), "").unwrap();
    }

    #[test]
    fn names() {
        assert_eq!(parse_file_name("blocks_1-100.jsonl"), Some((FileKind::Blocks, BlockRange { start: 1, end: 100 })));
        assert_eq!(parse_file_name("traces_5-5.jsonl").map(|p| p.0), Some(FileKind::Traces));
        assert_eq!(parse_file_name("blocks_9-1.jsonl"), None);
        assert_eq!(parse_file_name("blocks_1-100.json"), None);
        assert_eq!(parse_file_name("manifest.json"), None);
        assert_eq!(range_file_name(FileKind::Receipts, BlockRange { start: 3, end: 7 }), "receipts_3-7.jsonl");
    }

    #[test]
    fn sorted_and_checked() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "blocks_51-100.jsonl");
        touch(dir.path(), "blocks_1-50.jsonl");
        touch(dir.path(), "notes.txt");
        let set = RawFileSet::open(dir.path(), false).unwrap();
        let starts: Vec<u64> = set.files(FileKind::Blocks).iter().map(|f| f.range.start).collect();
        assert_eq!(starts, [1, 51]);
        assert_eq!(set.span(FileKind::Blocks), Some(BlockRange { start: 1, end: 100 }));
        assert!(set.files(FileKind::Traces).is_empty());
    }

    #[test]
    fn overlap_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "blocks_1-60.jsonl");
        touch(dir.path(), "blocks_50-100.jsonl");
        assert!(matches!(RawFileSet::open(dir.path(), true), Err(Error::Range(_))));
    }

    #[test]
    fn gaps_need_permission() {
        let dir = tempfile::tempdir().unwrap();
        touch(dir.path(), "traces_1-10.jsonl");
        touch(dir.path(), "traces_20-30.jsonl");
        assert!(matches!(RawFileSet::open(dir.path(), false), Err(Error::Range(_))));
        assert!(RawFileSet::open(dir.path(), true).is_ok());
    }

    #[test]
    fn range_text() {
        assert_eq!("5-9".parse::<BlockRange>().unwrap(), BlockRange { start: 5, end: 9 });
        assert!("9-5".parse::<BlockRange>().is_err());
        assert!("x".parse::<BlockRange>().is_err());
    }
}
