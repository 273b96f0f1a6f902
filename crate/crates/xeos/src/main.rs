use std::io::Write;
use std::num::NonZeroU64;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use xeos::config::{RunConfig, CONFIG_ENV};
use xeos::error::{Error, Result};
use xeos::ingest::bench_writers;
use xeos::pipeline::{extract, ExtractOptions};
use xeos::stats_run::{self, StatsOptions};
use xeos::synth::{self, GenConfig};
use xeos::validate::validate;
use xeos_core::etl::DatasetId;
use xeos_core::stats::DEFAULT_BUCKET_SIZE;
use xeos_core::AccountName;

/// Extract EOSIO-style raw chain data into CSV datasets and summarize them.
#[derive(Parser)]
#[command(name = "xeos", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Derive dataset CSVs from raw block, trace and receipt files.
    Extract(ExtractArgs),
    /// Compute summary.json and stats_*.csv from dataset CSVs.
    Stats(StatsArgs),
    /// Generate a synthetic chain and its manifest.
    Synth(SynthArgs),
    /// Check dataset CSVs against their invariants.
    Validate(ValidateArgs),
    /// Compare the buffered writer with per-record durable writes.
    Bench(BenchArgs),
}

#[derive(Args)]
struct Common {
    /// Run configuration file (JSON).
    #[arg(long, env = CONFIG_ENV)]
    config: Option<PathBuf>,
    /// Where to write the JSON run report; `-` for standard output.
    #[arg(long)]
    report: Option<String>,
}

#[derive(Args)]
struct ExtractArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Inclusive block range, e.g. 1-100000.
    #[arg(long)]
    range: Option<String>,
    /// Comma-separated subset of d1..d7.
    #[arg(long, value_delimiter = ',')]
    datasets: Option<Vec<DatasetId>>,
    /// Fail on the first anomaly instead of recording it.
    #[arg(long)]
    strict: bool,
    /// Accept gaps between raw file ranges.
    #[arg(long)]
    allow_gaps: bool,
    /// Replace the system-account set (comma-separated).
    #[arg(long, value_delimiter = ',')]
    system_accounts: Option<Vec<AccountName>>,
    /// Add to the system-account set (comma-separated).
    #[arg(long, value_delimiter = ',')]
    extra_system_accounts: Option<Vec<AccountName>>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    common: Common,
    /// Directory with dataset CSVs.
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    datasets: Option<Vec<DatasetId>>,
    /// Blocks per series bucket.
    #[arg(long)]
    bucket_size: Option<u64>,
    /// Block interval in seconds for the summary tps (default 0.5).
    #[arg(long)]
    block_interval: Option<f64>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    output: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    blocks: Option<u64>,
    /// Generator configuration file (JSON).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ValidateArgs {
    #[command(flatten)]
    common: Common,
    /// Directory with dataset CSVs.
    #[arg(long)]
    input: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    common: Common,
    /// Scratch directory for both writers.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = 100_000)]
    records: u64,
    #[arg(long)]
    buffer_capacity: Option<usize>,
    #[arg(long)]
    records_per_file: Option<u64>,
    #[arg(long)]
    flush_interval_ms: Option<u64>,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn emit_report<T: Serialize>(target: Option<&str>, report: &T) -> Result<()> {
    let Some(target) = target else {
        return Ok(());
    };
    let mut text = serde_json::to_string_pretty(report).expect("reports serialize");
    text.push('\n');
    if target == "-" {
        let mut out = std::io::stdout().lock();
        out.write_all(text.as_bytes()).map_err(|e| Error::io("<stdout>", e))
    } else {
        std::fs::write(target, text).map_err(|e| Error::io(target, e))
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Extract(args) => {
            let mut cfg = RunConfig::resolve(args.common.config.as_deref())?;
            override_opt(&mut cfg.input_dir, args.input);
            override_opt(&mut cfg.output_dir, args.output);
            override_opt(&mut cfg.block_range, args.range);
            override_opt(&mut cfg.datasets, args.datasets);
            override_opt(&mut cfg.system_accounts, args.system_accounts);
            if let Some(extra) = args.extra_system_accounts {
                cfg.extra_system_accounts = extra;
            }
            cfg.strict |= args.strict;
            cfg.allow_gaps |= args.allow_gaps;
            let opts = ExtractOptions {
                input_dir: cfg.require_input()?.to_path_buf(),
                output_dir: cfg.require_output()?.to_path_buf(),
                range: cfg.range()?,
                datasets: cfg.dataset_set()?,
                strict: cfg.strict,
                allow_gaps: cfg.allow_gaps,
                system_accounts: cfg.system_account_set(),
            };
            let report = extract(&opts)?;
            log::info!("extracted into {} in {} ms", opts.output_dir.display(), report.duration_ms);
            emit_report(args.common.report.as_deref(), &report)
        }
        Command::Stats(args) => {
            let mut cfg = RunConfig::resolve(args.common.config.as_deref())?;
            override_opt(&mut cfg.input_dir, args.input);
            override_opt(&mut cfg.output_dir, args.output);
            override_opt(&mut cfg.datasets, args.datasets);
            override_opt(&mut cfg.bucket_size, args.bucket_size);
            override_opt(&mut cfg.block_interval_secs, args.block_interval);
            let bucket_size = cfg.bucket_size.unwrap_or(DEFAULT_BUCKET_SIZE);
            let opts = StatsOptions {
                input_dir: cfg.require_input()?.to_path_buf(),
                output_dir: cfg.require_output()?.to_path_buf(),
                datasets: cfg.dataset_set()?,
                bucket_size: NonZeroU64::new(bucket_size)
                    .ok_or_else(|| Error::Config("bucket size must be at least 1".into()))?,
                block_interval_secs: cfg.block_interval_secs,
            };
            let (_, files) = stats_run::run(&opts)?;
            log::info!("wrote {} files into {}", files.len(), opts.output_dir.display());
            #[derive(Serialize)]
            struct StatsRunReport {
                files: Vec<String>,
            }
            emit_report(args.common.report.as_deref(), &StatsRunReport { files })
        }
        Command::Synth(args) => {
            let mut cfg = match &args.config {
                Some(path) => load_gen_config(path)?,
                None => GenConfig::default(),
            };
            override_value(&mut cfg.seed, args.seed);
            override_value(&mut cfg.n_blocks, args.blocks);
            let (_, manifest) = synth::generate(&cfg, &args.output)?;
            log::info!(
                "generated {} blocks, {} transactions, {} traces into {}",
                manifest.raw.blocks,
                manifest.raw.transactions,
                manifest.raw.traces,
                args.output.display()
            );
            Ok(())
        }
        Command::Validate(args) => {
            let mut cfg = RunConfig::resolve(args.common.config.as_deref())?;
            override_opt(&mut cfg.input_dir, args.input);
            let report = validate(cfg.require_input()?, &cfg.system_account_set())?;
            for v in &report.violations {
                eprintln!("{v}");
            }
            emit_report(args.common.report.as_deref(), &report)?;
            if report.is_clean() {
                log::info!("{} rows in {} files: no violations", report.rows, report.files.len());
                Ok(())
            } else {
                Err(Error::Schema {
                    count: report.violations.len(),
                })
            }
        }
        Command::Bench(args) => {
            let cfg = RunConfig::resolve(args.common.config.as_deref())?;
            let mut collector = cfg.collector;
            override_value(&mut collector.buffer_capacity, args.buffer_capacity);
            override_value(&mut collector.records_per_file, args.records_per_file);
            if let Some(ms) = args.flush_interval_ms {
                collector.flush_interval = Duration::from_millis(ms);
            }
            // a private subdirectory, so removing it never touches user files
            let scratch = args
                .output
                .or(cfg.output_dir)
                .unwrap_or_else(std::env::temp_dir)
                .join(format!("xeos-bench-{}", std::process::id()));
            collector.output_dir = scratch.clone();
            let workload = synth::trace_workload(1, args.records);
            let report = bench_writers(&workload, &collector)?;
            log::info!(
                "buffered {:.0} rec/s, synchronous {:.0} rec/s, speedup {}",
                report.buffered_rps,
                report.synchronous_rps,
                report.speedup().map_or("n/a".into(), |s| format!("{s:.2}x"))
            );
            let _ = std::fs::remove_dir_all(&scratch);
            emit_report(args.common.report.as_deref(), &report)
        }
    }
}

fn override_opt<T>(slot: &mut Option<T>, flag: Option<T>) {
    if flag.is_some() {
        *slot = flag;
    }
}

fn override_value<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}

fn load_gen_config(path: &Path) -> Result<GenConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::Parse {
        path: path.to_path_buf(),
        line: e.line() as u64,
        message: e.to_string(),
    })
}
