//! Run configuration file (JSON). Command-line flags override file values,
//! which override the defaults. `XEOS_CONFIG` names the file when no
//! `--config` flag is given.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use xeos_core::etl::{DatasetId, SystemAccounts};
use xeos_core::AccountName;

use crate::error::{Error, Result};
use crate::ingest::{BlockRange, CollectorConfig};

pub const CONFIG_ENV: &str = "XEOS_CONFIG";

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub input_dir: Option<PathBuf>,
    pub output_dir: Option<PathBuf>,
    /// Inclusive `start-end`.
    pub block_range: Option<String>,
    /// Subset of `d1`..`d7`; all when absent.
    pub datasets: Option<Vec<DatasetId>>,
    pub strict: bool,
    pub allow_gaps: bool,
    pub bucket_size: Option<u64>,
    pub block_interval_secs: Option<f64>,
    /// Replaces the default system-account set.
    pub system_accounts: Option<Vec<AccountName>>,
    /// Added to the system-account set.
    pub extra_system_accounts: Vec<AccountName>,
    pub collector: CollectorConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: e.line() as u64,
            message: e.to_string(),
        })
    }

    /// Loads `explicit`, else the file named by `XEOS_CONFIG`, else defaults.
    pub fn resolve(explicit: Option<&Path>) -> Result<Self> {
        match explicit {
            Some(path) => Self::load(path),
            None => match std::env::var_os(CONFIG_ENV) {
                Some(path) if !path.is_empty() => Self::load(Path::new(&path)),
                _ => Ok(Self::default()),
            },
        }
    }

    pub fn range(&self) -> Result<Option<BlockRange>> {
        self.block_range.as_deref().map(str::parse).transpose()
    }

    pub fn dataset_set(&self) -> Result<BTreeSet<DatasetId>> {
        match &self.datasets {
            None => Ok(DatasetId::ALL.into_iter().collect()),
            Some(list) if list.is_empty() => Err(Error::Config("dataset selection is empty".into())),
            Some(list) => Ok(list.iter().copied().collect()),
        }
    }

    pub fn system_account_set(&self) -> SystemAccounts {
        let extras = self.extra_system_accounts.iter().cloned();
        match &self.system_accounts {
            Some(list) => SystemAccounts::exactly(list.iter().cloned().chain(extras)),
            None => SystemAccounts::with_extras(extras),
        }
    }

    pub fn require_input(&self) -> Result<&Path> {
        self.input_dir
            .as_deref()
            .ok_or_else(|| Error::Config("no input directory (use --input or input_dir)".into()))
    }

    pub fn require_output(&self) -> Result<&Path> {
        self.output_dir
            .as_deref()
            .ok_or_else(|| Error::Config("no output directory (use --output or output_dir)".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_documented_fields() {
        let cfg: RunConfig = serde_json::from_str(
            r#"{"input_dir":"raw","block_range":"1-100","datasets":["d2","d6"],"strict":true,
                "extra_system_accounts":["eosio.rex"],"collector":{"buffer_capacity":64}}"#,
        )
        .unwrap();
        assert_eq!(cfg.range().unwrap(), Some(BlockRange { start: 1, end: 100 }));
        assert_eq!(cfg.dataset_set().unwrap().len(), 2);
        assert!(cfg.system_account_set().contains(&AccountName::new("eosio.rex").unwrap()));
        assert!(cfg.system_account_set().contains(&AccountName::new("eosio").unwrap()));
        assert_eq!(cfg.collector.buffer_capacity, 64);
        assert_eq!(cfg.collector.records_per_file, 100_000);
    }

    #[test]
    fn rejects_unknown_keys_and_empty_selection() {
        assert!(serde_json::from_str::<RunConfig>(r#"{"strictt":true}"#).is_err());
        let cfg: RunConfig = serde_json::from_str(r#"{"datasets":[]}"#).unwrap();
        assert!(matches!(cfg.dataset_set(), Err(Error::Config(_))));
    }
}
