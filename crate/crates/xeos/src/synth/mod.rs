//! Deterministic synthetic chains with a manifest of the values extraction
//! and statistics must reproduce.
//!
//! All randomness comes from one ChaCha8 stream seeded with `seed`, drawn in
//! this order: per block, the block id bytes then the Poisson transaction
//! count; per transaction, the id bytes, the deferred flag and kind (both
//! skipped for setup transactions), the kind-specific values, the CPU and NET
//! usage, and whether the block omits the usage.
//! Contract interfaces and token symbols are drawn before the first block.

mod names;

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::num::NonZeroU64;
use std::path::Path;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use xeos_core::etl::*;
use xeos_core::stats::tokenize;
use xeos_core::{
    AccountName, ActionName, ActionTrace, Asset, Authorization, Digest, EosAmount, RawAction, RawBlock,
    RawTransaction, Timestamp, TransactionReceipt, TxStatus,
};

use crate::dataset::CsvRow;
use crate::error::{Error, Result};
use crate::ingest::{RangeFileWriter, RawFileSet};
use crate::stats_run::{StatsReport, StatsSet};
pub use names::encode_name;

pub const MANIFEST_FILE: &str = "manifest.json";

/// Timestamp of block 1.
pub const GENESIS_MILLIS: i64 = 1_528_445_288_500;
pub const BLOCK_INTERVAL_MS: i64 = 500;
pub const PRODUCERS: u64 = 21;
/// Consecutive blocks produced by one producer.
pub const PRODUCER_ROUND: u64 = 12;

/// Relative weights of the random transaction kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TxMix {
    pub eos_transfer: u32,
    pub invocation: u32,
    pub resource: u32,
    pub token_transfer: u32,
    pub new_account: u32,
    pub code_update: u32,
}

impl Default for TxMix {
    fn default() -> Self {
        Self {
            eos_transfer: 40,
            invocation: 30,
            resource: 10,
            token_transfer: 15,
            new_account: 4,
            code_update: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    pub n_blocks: u64,
    pub mean_tx_per_block: f64,
    pub n_accounts: u32,
    pub n_contracts: u32,
    pub n_token_contracts: u32,
    pub deferred_ratio: f64,
    /// Share of successful contract invocations that pay out EOS inline.
    pub inline_transfer_ratio: f64,
    /// Share of contract invocations that fail.
    pub error_ratio: f64,
    /// Share of EOS transfers that fail.
    pub failed_transfer_ratio: f64,
    /// Share of transactions whose usage appears only in the receipt.
    pub omit_block_usage_ratio: f64,
    pub tx_mix: TxMix,
    pub resource_action_mix: BTreeMap<ResourceAction, u32>,
    /// Memo terms and their weights. Each must be a single token.
    pub memo_term_mix: BTreeMap<String, u32>,
    pub records_per_file: u64,
    /// Bucket size of the series recorded in the manifest.
    pub bucket_size: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        use ResourceAction::*;
        Self {
            seed: 1,
            n_blocks: 1_000,
            mean_tx_per_block: 28.0,
            n_accounts: 500,
            n_contracts: 20,
            n_token_contracts: 5,
            deferred_ratio: 1.0 / 7.0,
            inline_transfer_ratio: 0.3,
            error_ratio: 0.05,
            failed_transfer_ratio: 0.01,
            omit_block_usage_ratio: 0.2,
            tx_mix: TxMix::default(),
            resource_action_mix: [
                (StakeCpu, 20),
                (UnstakeCpu, 8),
                (StakeNet, 10),
                (UnstakeNet, 5),
                (BuyRam, 15),
                (SellRam, 5),
                (BuyRex, 6),
                (SellRex, 3),
                (RentCpu, 10),
                (RentNet, 2),
            ]
            .into_iter()
            .collect(),
            memo_term_mix: [
                ("bet", 6),
                ("win", 4),
                ("dice", 3),
                ("airdrop", 4),
                ("deposit", 2),
                ("withdraw", 2),
                ("eos", 2),
                ("thanks", 1),
            ]
            .into_iter()
            .map(|(k, v)| (k.to_string(), v))
            .collect(),
            records_per_file: 100_000,
            bucket_size: 1_000,
        }
    }
}

impl GenConfig {
    pub fn with_seed(seed: u64, n_blocks: u64) -> Self {
        Self {
            seed,
            n_blocks,
            ..Self::default()
        }
    }

    pub fn check(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        for (name, v) in [
            ("deferred_ratio", self.deferred_ratio),
            ("inline_transfer_ratio", self.inline_transfer_ratio),
            ("error_ratio", self.error_ratio),
            ("failed_transfer_ratio", self.failed_transfer_ratio),
            ("omit_block_usage_ratio", self.omit_block_usage_ratio),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must be in [0, 1], got {v}"));
            }
        }
        if !(self.mean_tx_per_block.is_finite() && self.mean_tx_per_block >= 0.0) {
            return bad(format!("mean_tx_per_block must be >= 0, got {}", self.mean_tx_per_block));
        }
        if self.n_blocks == 0 {
            return bad("n_blocks must be at least 1".into());
        }
        if self.n_accounts == 0 {
            return bad("n_accounts must be at least 1".into());
        }
        if self.n_token_contracts > self.n_contracts {
            return bad("n_token_contracts must not exceed n_contracts".into());
        }
        if self.records_per_file == 0 || self.bucket_size == 0 {
            return bad("records_per_file and bucket_size must be at least 1".into());
        }
        let m = &self.tx_mix;
        if [m.eos_transfer, m.invocation, m.resource, m.token_transfer, m.new_account, m.code_update]
            .iter()
            .all(|w| *w == 0)
        {
            return bad("tx_mix needs a non-zero weight".into());
        }
        if self.resource_action_mix.values().all(|w| *w == 0) {
            return bad("resource_action_mix needs a non-zero weight".into());
        }
        if self.memo_term_mix.values().all(|w| *w == 0) {
            return bad("memo_term_mix needs a non-zero weight".into());
        }
        for term in self.memo_term_mix.keys() {
            if tokenize(term).collect::<Vec<_>>() != [term.clone()] {
                return bad(format!("memo term {term:?} is not a single lowercase token"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct RawCounts {
    pub blocks: u64,
    pub transactions: u64,
    pub traces: u64,
    pub receipts: u64,
}

/// Values the pipeline must reproduce on the generated chain.
#[derive(Debug, Clone, Serialize)]
pub struct GroundTruthManifest {
    pub config: GenConfig,
    pub raw: RawCounts,
    /// Row counts per output file, `anomalies.csv` included.
    pub rows: BTreeMap<String, u64>,
    pub anomalies: BTreeMap<String, u64>,
    pub token_contracts: Vec<AccountName>,
    pub stats: StatsReport,
}

impl GroundTruthManifest {
    /// JSON with sorted keys.
    pub fn to_json(&self) -> String {
        let value = serde_json::to_value(self).expect("manifest serializes");
        let mut text = serde_json::to_string_pretty(&value).expect("manifest serializes");
        text.push('\n');
        text
    }
}

/// Generates a chain into `out_dir` and writes `manifest.json` beside it.
pub fn generate(config: &GenConfig, out_dir: impl AsRef<Path>) -> Result<(RawFileSet, GroundTruthManifest)> {
    config.check()?;
    let out_dir = out_dir.as_ref();
    let mut chain = Chain::new(config);
    let mut blocks = RangeFileWriter::<RawBlock>::new(out_dir, config.records_per_file)?.starting_at(1);
    let mut traces = RangeFileWriter::<ActionTrace>::new(out_dir, config.records_per_file)?.starting_at(1);
    let mut receipts = RangeFileWriter::<TransactionReceipt>::new(out_dir, config.records_per_file)?.starting_at(1);
    let mut out = BlockOutput::default();
    for block_num in 1..=config.n_blocks {
        out.clear();
        let block = chain.block(block_num, &mut out);
        blocks.write(&block)?;
        out.traces.iter().try_for_each(|t| traces.write(t))?;
        out.receipts.iter().try_for_each(|r| receipts.write(r))?;
    }
    let end = Some(config.n_blocks);
    blocks.finish(end)?;
    traces.finish(end)?;
    receipts.finish(end)?;

    let manifest = chain.manifest();
    let path = out_dir.join(MANIFEST_FILE);
    std::fs::write(&path, manifest.to_json()).map_err(|e| Error::io(&path, e))?;
    Ok((RawFileSet::open(out_dir, false)?, manifest))
}

#[derive(Default)]
struct BlockOutput {
    traces: Vec<ActionTrace>,
    receipts: Vec<TransactionReceipt>,
}

impl BlockOutput {
    fn clear(&mut self) {
        self.traces.clear();
        self.receipts.clear();
    }
}

struct TokenSymbol {
    code: String,
    precision: u8,
    issuer: Option<AccountName>,
}

struct Contract {
    name: AccountName,
    abi: Vec<&'static str>,
    symbols: Vec<TokenSymbol>,
}

enum Setup {
    Deploy(usize),
    Create(usize, usize),
    Issue(usize, usize),
}

#[derive(Clone, Copy)]
enum Kind {
    EosTransfer,
    Invocation,
    Resource,
    TokenTransfer,
    NewAccount,
    CodeUpdate,
}

const KINDS: [Kind; 6] = [
    Kind::EosTransfer,
    Kind::Invocation,
    Kind::Resource,
    Kind::TokenTransfer,
    Kind::NewAccount,
    Kind::CodeUpdate,
];

const GAME_FUNCTIONS: [&str; 10] = [
    "bet", "reveal", "claim", "deposit", "withdraw", "vote", "play", "open", "transfer", "issue",
];
const TOKEN_EXTRAS: [&str; 3] = ["retire", "open", "close"];
const SEPARATORS: [&str; 3] = [" ", ", ", "! "];

/// Transaction under construction plus the rows it should yield.
struct TxBuilder {
    block_num: u64,
    tx_id: Digest,
    status: TxStatus,
    actions: Vec<RawAction>,
    traces: Vec<ActionTrace>,
}

struct Chain<'a> {
    cfg: &'a GenConfig,
    rng: ChaCha8Rng,
    users: Vec<AccountName>,
    producers: Vec<AccountName>,
    contracts: Vec<Contract>,
    setup: VecDeque<Setup>,
    kinds: WeightedIndex<u32>,
    resource_actions: Vec<ResourceAction>,
    resource_weights: WeightedIndex<u32>,
    memo_terms: Vec<String>,
    memo_weights: WeightedIndex<u32>,
    poisson: Option<Poisson<f64>>,
    next_seq: u64,
    created_accounts: u64,
    timestamp: Timestamp,
    // expectations
    stats: StatsSet,
    raw: RawCounts,
    rows: BTreeMap<String, u64>,
    anomalies: BTreeMap<String, u64>,
}

fn name(s: &str) -> AccountName {
    AccountName::new(s).expect("generated names are valid")
}

fn eos(units: i64) -> String {
    EosAmount::from_units(units).to_string()
}

impl<'a> Chain<'a> {
    fn new(cfg: &'a GenConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let users = (0..u64::from(cfg.n_accounts))
            .map(|i| name(&format!("user{}", encode_name(i))))
            .collect();
        let producers = (0..PRODUCERS).map(|i| name(&format!("producer{}", encode_name(i)))).collect();

        let mut contracts = Vec::new();
        for i in 0..cfg.n_contracts {
            let is_token = i < cfg.n_token_contracts;
            let prefix = if is_token { "token" } else { "game" };
            let contract_name = name(&format!("{prefix}{}", encode_name(u64::from(i))));
            let (abi, symbols) = if is_token {
                let mut abi = TOKEN_INTERFACE.to_vec();
                abi.extend(TOKEN_EXTRAS.iter().filter(|_| rng.random_bool(0.5)));
                let n_symbols = rng.random_range(1..=2usize);
                let symbols = (0..n_symbols)
                    .map(|s| TokenSymbol {
                        code: symbol_code(i as usize * 2 + s),
                        precision: [2, 4, 6, 8][rng.random_range(0..4usize)],
                        issuer: None,
                    })
                    .collect();
                (abi, symbols)
            } else {
                (game_abi(&mut rng), Vec::new())
            };
            contracts.push(Contract {
                name: contract_name,
                abi,
                symbols,
            });
        }
        let mut setup: VecDeque<Setup> = (0..contracts.len()).map(Setup::Deploy).collect();
        for (ci, c) in contracts.iter().enumerate() {
            for si in 0..c.symbols.len() {
                setup.push_back(Setup::Create(ci, si));
                setup.push_back(Setup::Issue(ci, si));
            }
        }

        let m = &cfg.tx_mix;
        let kinds = WeightedIndex::new([
            m.eos_transfer,
            m.invocation,
            m.resource,
            m.token_transfer,
            m.new_account,
            m.code_update,
        ])
        .expect("checked weights");
        let resource_actions: Vec<ResourceAction> = cfg.resource_action_mix.keys().copied().collect();
        let resource_weights = WeightedIndex::new(cfg.resource_action_mix.values().copied()).expect("checked weights");
        let memo_terms: Vec<String> = cfg.memo_term_mix.keys().cloned().collect();
        let memo_weights = WeightedIndex::new(cfg.memo_term_mix.values().copied()).expect("checked weights");
        let poisson = (cfg.mean_tx_per_block > 0.0).then(|| Poisson::new(cfg.mean_tx_per_block).expect("checked mean"));

        Self {
            cfg,
            rng,
            users,
            producers,
            contracts,
            setup,
            kinds,
            resource_actions,
            resource_weights,
            memo_terms,
            memo_weights,
            poisson,
            next_seq: 1,
            created_accounts: 0,
            timestamp: Timestamp::from_millis(GENESIS_MILLIS),
            stats: StatsSet::new(NonZeroU64::new(cfg.bucket_size).expect("checked bucket size")),
            raw: RawCounts::default(),
            rows: BTreeMap::new(),
            anomalies: BTreeMap::new(),
        }
    }

    fn count_row(&mut self, file: &str) {
        *self.rows.entry(file.to_string()).or_insert(0) += 1;
    }

    fn count_anomaly(&mut self, reason: &str) {
        *self.anomalies.entry(reason.to_string()).or_insert(0) += 1;
        self.count_row(crate::dataset::ANOMALIES_FILE);
    }

    fn digest(&mut self) -> Digest {
        let mut bytes = [0u8; 32];
        self.rng.fill(&mut bytes);
        Digest::from_bytes(&bytes)
    }

    fn user(&mut self) -> AccountName {
        let i = self.rng.random_range(0..self.users.len());
        self.users[i].clone()
    }

    fn block(&mut self, block_num: u64, out: &mut BlockOutput) -> RawBlock {
        if block_num > 1 {
            self.timestamp = self.timestamp.add_millis(BLOCK_INTERVAL_MS);
        }
        let block_id = self.digest();
        let n_tx = match &self.poisson {
            Some(p) => p.sample(&mut self.rng) as u64,
            None => 0,
        };
        let producer = self.producers[((block_num - 1) / PRODUCER_ROUND % PRODUCERS) as usize].clone();
        let mut transactions = Vec::with_capacity(n_tx as usize);
        for _ in 0..n_tx {
            transactions.push(self.transaction(block_num, out));
        }
        let block = RawBlock {
            block_num,
            block_id,
            timestamp: self.timestamp,
            producer,
            transactions,
        };
        self.raw.blocks += 1;
        self.count_row(D1BlockRow::FILE);
        self.stats.push_block(&D1BlockRow {
            block_num,
            block_id: block.block_id.clone(),
            timestamp: block.timestamp,
            producer: block.producer.clone(),
            tx_count: n_tx,
        });
        block
    }

    fn transaction(&mut self, block_num: u64, out: &mut BlockOutput) -> RawTransaction {
        let mut tx = TxBuilder {
            block_num,
            tx_id: self.digest(),
            status: TxStatus::Executed,
            actions: Vec::new(),
            traces: Vec::new(),
        };
        let is_deferred = match self.setup.pop_front() {
            Some(step) => {
                self.setup_tx(step, block_num, &mut tx);
                false
            }
            None => {
                let is_deferred = self.rng.random_bool(self.cfg.deferred_ratio);
                let kind = KINDS[self.kinds.sample(&mut self.rng)];
                self.random_tx(kind, block_num, &mut tx);
                is_deferred
            }
        };
        let cpu_usage_us = self.rng.random_range(100..=2_000u64);
        let net_usage_words = self.rng.random_range(10..=60u64);
        let omit_usage = self.rng.random_bool(self.cfg.omit_block_usage_ratio);
        let tx_id = tx.tx_id.clone();
        self.raw.traces += tx.traces.len() as u64;
        out.traces.append(&mut tx.traces);
        out.receipts.push(TransactionReceipt {
            tx_id: tx_id.clone(),
            block_num,
            status: tx.status,
            cpu_usage_us,
            net_usage_words,
        });
        self.raw.receipts += 1;
        self.raw.transactions += 1;

        let row = D1TransactionRow {
            tx_id: tx_id.clone(),
            block_num,
            is_deferred,
            status: tx.status,
            cpu_usage_us,
            net_usage_words,
        };
        self.count_row(D1TransactionRow::FILE);
        self.stats.push_transaction(&row);
        for _ in &tx.actions {
            self.count_row(D1ActionRow::FILE);
            self.stats.push_action(block_num);
        }
        RawTransaction {
            tx_id,
            status: tx.status,
            is_deferred,
            cpu_usage_us: (!omit_usage).then_some(cpu_usage_us),
            net_usage_words: (!omit_usage).then_some(net_usage_words),
            actions: tx.actions,
        }
    }

    fn trace(
        &mut self,
        tx: &mut TxBuilder,
        parent_seq: Option<u64>,
        receiver: &AccountName,
        act: &RawAction,
        error: Option<&str>,
    ) -> u64 {
        let global_seq = self.next_seq;
        self.next_seq += 1;
        tx.traces.push(ActionTrace {
            global_seq,
            tx_id: tx.tx_id.clone(),
            block_num: tx.block_num,
            parent_seq,
            receiver: receiver.clone(),
            act: act.clone(),
            error: error.map(str::to_string),
            console: None,
        });
        global_seq
    }

    /// Records a top-level action: packaged in the transaction, traced, and
    /// notified to `notify`.
    fn top_level(
        &mut self,
        tx: &mut TxBuilder,
        act: RawAction,
        notify: &[&AccountName],
        error: Option<&str>,
    ) -> u64 {
        let seq = self.trace(tx, None, &act.contract, &act, error);
        if error.is_none() {
            for n in dedup(notify) {
                self.trace(tx, None, n, &act, None);
            }
        }
        tx.actions.push(act);
        seq
    }

    fn inline(&mut self, tx: &mut TxBuilder, parent: u64, act: RawAction, notify: &[&AccountName]) {
        self.trace(tx, Some(parent), &act.contract, &act, None);
        for n in dedup(notify) {
            self.trace(tx, Some(parent), n, &act, None);
        }
    }

    fn setup_tx(&mut self, step: Setup, block_num: u64, tx: &mut TxBuilder) {
        match step {
            Setup::Deploy(ci) => {
                let abi = self.contracts[ci].abi.clone();
                let account = self.contracts[ci].name.clone();
                self.deploy(tx, block_num, &account, Some(abi), true);
            }
            Setup::Create(ci, si) => {
                let issuer = self.user();
                let whole = self.rng.random_range(1_000..=1_000_000_000i64);
                let c = &mut self.contracts[ci];
                let sym = &mut c.symbols[si];
                sym.issuer = Some(issuer.clone());
                let max_units = 10i64.pow(u32::from(sym.precision)) * whole;
                let supply = asset(max_units, sym.precision, &sym.code);
                let (contract, symbol, precision) = (c.name.clone(), sym.code.clone(), sym.precision);
                let act = action(
                    &contract,
                    "create",
                    &contract,
                    json!({"issuer": issuer.as_str(), "maximum_supply": supply}),
                );
                self.top_level(tx, act, &[], None);
                self.expect_invocation(block_num, &tx.tx_id, &contract, "create", &contract, None);
                self.count_row(D5TokenRow::FILE);
                self.stats.push_token(&D5TokenRow {
                    contract,
                    symbol,
                    precision,
                    created_at: self.timestamp,
                    issuer,
                    max_supply_units: max_units,
                });
            }
            Setup::Issue(ci, si) => {
                let c = &self.contracts[ci];
                let sym = &c.symbols[si];
                let quantity = asset(10i64.pow(u32::from(sym.precision)) * 1_000, sym.precision, &sym.code);
                let contract = c.name.clone();
                let issuer = sym.issuer.clone().expect("issue follows create");
                let act = action(
                    &contract,
                    "issue",
                    &issuer,
                    json!({"to": issuer.as_str(), "quantity": quantity, "memo": ""}),
                );
                self.top_level(tx, act, &[], None);
                self.expect_invocation(block_num, &tx.tx_id, &contract, "issue", &issuer, None);
            }
        }
    }

    fn random_tx(&mut self, kind: Kind, block_num: u64, tx: &mut TxBuilder) {
        let n_games = self.contracts.len() - self.cfg.n_token_contracts as usize;
        let kind = match kind {
            Kind::TokenTransfer if self.cfg.n_token_contracts == 0 => Kind::EosTransfer,
            Kind::Invocation | Kind::CodeUpdate if n_games == 0 => Kind::EosTransfer,
            k => k,
        };
        match kind {
            Kind::EosTransfer => {
                // a failed transaction stops at its first action
                let failed = self.rng.random_bool(self.cfg.failed_transfer_ratio);
                let n_actions = if self.rng.random_bool(0.1) { 2 } else { 1 };
                for i in 0..n_actions {
                    let (from, to) = (self.user(), self.user());
                    let units = self.eos_units();
                    let memo = self.memo();
                    let act = transfer_action(&from, &to, units, &memo);
                    if failed && i > 0 {
                        tx.actions.push(act);
                    } else if failed {
                        self.top_level(tx, act, &[], Some("assertion failure with message: overdrawn balance"));
                        tx.status = TxStatus::HardFail;
                        self.count_anomaly("d2_failed_action");
                    } else {
                        self.top_level(tx, act, &[&from, &to], None);
                        self.expect_transfer(block_num, &tx.tx_id, from, to, units, memo, TransferKind::External);
                    }
                }
            }
            Kind::Invocation => {
                let ci = self.cfg.n_token_contracts as usize + self.rng.random_range(0..n_games);
                let contract = self.contracts[ci].name.clone();
                let abi = &self.contracts[ci].abi;
                let function = abi[self.rng.random_range(0..abi.len())];
                let player = self.user();
                let nonce: u32 = self.rng.random();
                let act = action(&contract, function, &player, json!({"player": player.as_str(), "nonce": nonce}));
                if self.rng.random_bool(self.cfg.error_ratio) {
                    let error = "assertion failure with message: game is closed";
                    self.top_level(tx, act, &[], Some(error));
                    tx.status = TxStatus::HardFail;
                    self.expect_invocation(block_num, &tx.tx_id, &contract, function, &player, Some(error));
                } else {
                    let seq = self.top_level(tx, act, &[], None);
                    self.expect_invocation(block_num, &tx.tx_id, &contract, function, &player, None);
                    if self.rng.random_bool(self.cfg.inline_transfer_ratio) {
                        let units = self.eos_units();
                        let memo = self.memo();
                        let pay = transfer_action(&contract, &player, units, &memo);
                        self.inline(tx, seq, pay, &[&contract, &player]);
                        self.expect_transfer(block_num, &tx.tx_id, contract, player, units, memo, TransferKind::Internal);
                    }
                }
            }
            Kind::Resource => {
                let action_kind = self.resource_actions[self.resource_weights.sample(&mut self.rng)];
                let actor = self.user();
                let units = self.rng.random_range(1..=10_000_000i64);
                let data = match action_kind {
                    ResourceAction::BuyRam | ResourceAction::SellRam => {
                        json!({"payer": actor.as_str(), "receiver": actor.as_str(), "quantity": eos(units)})
                    }
                    _ => json!({"from": actor.as_str(), "receiver": actor.as_str(), "quantity": eos(units)}),
                };
                let act = action(&name(EOSIO), action_kind.as_str(), &actor, data);
                let seq = self.top_level(tx, act, &[], None);
                self.count_row(D7Record::FILE);
                self.stats.push_resource(&D7Record {
                    block_num,
                    timestamp: self.timestamp,
                    actor: actor.clone(),
                    category: action_kind.category(),
                    action: action_kind,
                    eos_amount: EosAmount::from_units(units),
                });
                if action_kind == ResourceAction::BuyRam {
                    let ram = name("eosio.ram");
                    let pay = transfer_action(&actor, &ram, units, "buy ram");
                    self.inline(tx, seq, pay, &[&actor, &ram]);
                    self.expect_transfer(block_num, &tx.tx_id, actor, ram, units, "buy ram".into(), TransferKind::Internal);
                }
            }
            Kind::TokenTransfer => {
                let ci = self.rng.random_range(0..self.cfg.n_token_contracts as usize);
                let si = self.rng.random_range(0..self.contracts[ci].symbols.len());
                let (from, to) = (self.user(), self.user());
                let units = self.rng.random_range(1..=1_000_000_000i64);
                let memo = self.memo();
                let c = &self.contracts[ci];
                let sym = &c.symbols[si];
                let contract = c.name.clone();
                let symbol = sym.code.clone();
                let quantity = asset(units, sym.precision, &sym.code);
                let act = action(
                    &contract,
                    "transfer",
                    &from,
                    json!({"from": from.as_str(), "to": to.as_str(), "quantity": quantity, "memo": memo}),
                );
                self.top_level(tx, act, &[&from, &to], None);
                self.expect_invocation(block_num, &tx.tx_id, &contract, "transfer", &from, None);
                self.count_row(D5TransferRow::FILE);
                self.stats.push_token_transfer(&D5TransferRow {
                    block_num,
                    timestamp: self.timestamp,
                    contract,
                    symbol,
                    from,
                    to,
                    amount_units: units,
                    memo,
                });
            }
            Kind::NewAccount => {
                let creator = self.user();
                let new_account = name(&format!("acct{}", encode_name(self.created_accounts)));
                self.created_accounts += 1;
                let act = action(
                    &name(EOSIO),
                    "newaccount",
                    &creator,
                    json!({"creator": creator.as_str(), "name": new_account.as_str()}),
                );
                self.top_level(tx, act, &[], None);
                self.count_row(D6Record::FILE);
                self.stats.push_account(&D6Record {
                    block_num,
                    timestamp: self.timestamp,
                    creator,
                    new_account,
                });
            }
            Kind::CodeUpdate => {
                let ci = self.cfg.n_token_contracts as usize + self.rng.random_range(0..n_games);
                let account = self.contracts[ci].name.clone();
                let abi = if self.rng.random_bool(0.3) {
                    None
                } else {
                    let abi = game_abi(&mut self.rng);
                    self.contracts[ci].abi = abi.clone();
                    Some(abi)
                };
                self.deploy(tx, block_num, &account, abi, false);
            }
        }
    }

    /// A `setcode` action; `None` deploys empty code.
    fn deploy(&mut self, tx: &mut TxBuilder, block_num: u64, account: &AccountName, abi: Option<Vec<&str>>, first: bool) {
        let code: Vec<u8> = match abi {
            Some(_) => {
                let len = self.rng.random_range(64..=4_096usize);
                (0..len).map(|_| self.rng.random()).collect()
            }
            None => Vec::new(),
        };
        let mut data = json!({"account": account.as_str(), "code": hex::encode(&code)});
        if let Some(abi) = &abi {
            data["abi"] = json!(abi);
        }
        let act = action(&name(EOSIO), "setcode", account, data);
        self.top_level(tx, act, &[], None);
        self.count_row(D3Record::FILE);
        let (action_kind, code_hash) = if code.is_empty() {
            (CodeAction::SetEmptyCode, String::new())
        } else {
            (CodeAction::SetCode, code_digest(&code))
        };
        self.stats.push_contract(&D3Record {
            account: account.clone(),
            block_num,
            timestamp: self.timestamp,
            action_kind,
            code_hash,
            code_size_bytes: 2 * code.len() as u64,
            is_first_deploy: first,
        });
    }

    fn expect_invocation(
        &mut self,
        block_num: u64,
        tx_id: &Digest,
        contract: &AccountName,
        function: &str,
        authorizer: &AccountName,
        error: Option<&str>,
    ) {
        self.count_row(D4Record::FILE);
        self.stats.push_invocation(&D4Record {
            block_num,
            timestamp: self.timestamp,
            tx_id: tx_id.clone(),
            authorizer: Some(authorizer.clone()),
            contract: contract.clone(),
            function: ActionName::new(function).expect("valid function name"),
            has_error: error.is_some(),
            error_text: error.unwrap_or_default().to_string(),
        });
    }

    #[allow(clippy::too_many_arguments)]
    fn expect_transfer(
        &mut self,
        block_num: u64,
        tx_id: &Digest,
        from: AccountName,
        to: AccountName,
        units: i64,
        memo: String,
        kind: TransferKind,
    ) {
        self.count_row(D2Record::FILE);
        self.stats.push_transfer(&D2Record {
            block_num,
            timestamp: self.timestamp,
            tx_id: tx_id.clone(),
            from,
            to,
            amount: EosAmount::from_units(units),
            memo,
            kind,
        });
    }

    /// Mostly small amounts: 90% log-uniform in [0.0001, 10) EOS, the rest
    /// log-uniform in [10, 100,000) EOS.
    fn eos_units(&mut self) -> i64 {
        let (lo, hi): (f64, f64) = if self.rng.random_bool(0.9) { (1.0, 1e5) } else { (1e5, 1e9) };
        let x = self.rng.random_range(lo.ln()..hi.ln()).exp();
        (x as i64).clamp(lo as i64, hi as i64 - 1)
    }

    /// Empty, or one to three weighted terms with occasional capitals.
    fn memo(&mut self) -> String {
        if self.rng.random_bool(0.3) {
            return String::new();
        }
        let n = self.rng.random_range(1..=3);
        let mut memo = String::new();
        for i in 0..n {
            if i > 0 {
                memo.push_str(SEPARATORS[self.rng.random_range(0..SEPARATORS.len())]);
            }
            let term = &self.memo_terms[self.memo_weights.sample(&mut self.rng)];
            if self.rng.random_bool(0.2) {
                let mut chars = term.chars();
                let first = chars.next().expect("terms are non-empty");
                memo.extend(first.to_uppercase());
                memo.push_str(chars.as_str());
            } else {
                memo.push_str(term);
            }
        }
        memo
    }

    fn manifest(mut self) -> GroundTruthManifest {
        for file in DatasetId::ALL.iter().flat_map(|&d| crate::dataset::dataset_files(d)) {
            self.rows.entry(file.to_string()).or_insert(0);
        }
        self.rows.entry(crate::dataset::ANOMALIES_FILE.to_string()).or_insert(0);
        let all: BTreeSet<DatasetId> = DatasetId::ALL.into_iter().collect();
        GroundTruthManifest {
            config: self.cfg.clone(),
            raw: self.raw,
            rows: self.rows,
            anomalies: self.anomalies,
            token_contracts: self
                .contracts
                .iter()
                .filter(|c| !c.symbols.is_empty())
                .map(|c| c.name.clone())
                .collect(),
            stats: self.stats.report(&all),
        }
    }
}

fn dedup<'n>(accounts: &[&'n AccountName]) -> Vec<&'n AccountName> {
    let mut out: Vec<&AccountName> = Vec::with_capacity(accounts.len());
    for a in accounts {
        if !out.contains(a) {
            out.push(a);
        }
    }
    out
}

fn game_abi(rng: &mut ChaCha8Rng) -> Vec<&'static str> {
    let mut abi: Vec<&'static str> = GAME_FUNCTIONS.iter().copied().filter(|_| rng.random_bool(0.4)).collect();
    if abi.is_empty() {
        abi.push(GAME_FUNCTIONS[0]);
    }
    abi
}

/// Three uppercase letters, distinct for every index below 26³.
fn symbol_code(index: usize) -> String {
    let letter = |i: usize| (b'A' + (i % 26) as u8) as char;
    [letter(index / 676), letter(index / 26), letter(index)].iter().collect()
}

fn asset(units: i64, precision: u8, symbol: &str) -> String {
    Asset {
        units,
        precision,
        symbol: symbol.to_string(),
    }
    .to_string()
}

fn action(contract: &AccountName, function: &str, actor: &AccountName, data: Value) -> RawAction {
    let Value::Object(data) = data else {
        unreachable!("action data is an object")
    };
    RawAction {
        contract: contract.clone(),
        function: ActionName::new(function).expect("valid function name"),
        authorizers: vec![Authorization {
            actor: actor.clone(),
            permission: "active".into(),
        }],
        data,
        hex_data: String::new(),
    }
}

fn transfer_action(from: &AccountName, to: &AccountName, units: i64, memo: &str) -> RawAction {
    let mut data = Map::new();
    data.insert("from".into(), from.as_str().into());
    data.insert("to".into(), to.as_str().into());
    data.insert("quantity".into(), eos(units).into());
    data.insert("memo".into(), memo.into());
    action(&name(EOSIO_TOKEN), "transfer", from, Value::Object(data))
}

/// `n` EOS transfer traces, ten per block, as a writer benchmark workload.
pub fn trace_workload(seed: u64, n: u64) -> Vec<ActionTrace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let users: Vec<AccountName> = (0..64).map(|i| name(&format!("user{}", encode_name(i)))).collect();
    (0..n)
        .map(|i| {
            let from = &users[rng.random_range(0..users.len())];
            let to = &users[rng.random_range(0..users.len())];
            let mut id = [0u8; 32];
            rng.fill(&mut id);
            let act = transfer_action(from, to, rng.random_range(1..1_000_000), "bench");
            ActionTrace {
                global_seq: i + 1,
                tx_id: Digest::from_bytes(&id),
                block_num: i / 10 + 1,
                parent_seq: None,
                receiver: act.contract.clone(),
                act,
                error: None,
                console: None,
            }
        })
        .collect()
}
