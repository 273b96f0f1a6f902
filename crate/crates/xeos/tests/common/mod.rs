//! Brute-force re-derivation of everything a synthetic manifest records,
//! straight from the raw JSON-lines files. Works on untyped JSON and shares
//! no code with the crates under test, so agreement is evidence rather than
//! tautology.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader};
use std::path::Path;

use serde_json::{json, Map, Value};

const SYSTEM: [&str; 5] = ["eosio", "eosio.token", "eosio.msig", "eosio.ram", "eosio.ramfee"];
const RESOURCE: [(&str, &str); 10] = [
    ("stakecpu", "CPU"),
    ("unstakecpu", "CPU"),
    ("stakenet", "NET"),
    ("unstakenet", "NET"),
    ("buyram", "RAM"),
    ("sellram", "RAM"),
    ("buyrex", "REX"),
    ("sellrex", "REX"),
    ("rentcpu", "REX"),
    ("rentnet", "REX"),
];

/// Raw records of one family, files sorted by start block.
pub fn raw_records(dir: &Path, kind: &str) -> Vec<Value> {
    let mut files: Vec<(u64, std::path::PathBuf)> = fs::read_dir(dir)
        .unwrap()
        .filter_map(|e| {
            let path = e.unwrap().path();
            let name = path.file_name()?.to_str()?.to_string();
            let rest = name.strip_prefix(&format!("{kind}_"))?.strip_suffix(".jsonl")?;
            let start: u64 = rest.split('-').next()?.parse().ok()?;
            Some((start, path))
        })
        .collect();
    files.sort();
    let mut out = Vec::new();
    for (_, path) in files {
        for line in BufReader::new(fs::File::open(path).unwrap()).lines() {
            let line = line.unwrap();
            if !line.trim().is_empty() {
                out.push(serde_json::from_str(&line).unwrap());
            }
        }
    }
    out
}

fn name_ok(s: &str) -> bool {
    let b = s.as_bytes();
    !b.is_empty()
        && b.len() <= 12
        && b[0] != b'.'
        && b[b.len() - 1] != b'.'
        && b.iter().all(|c| matches!(c, b'a'..=b'z' | b'1'..=b'5' | b'.'))
}

fn name_field(data: &Value, key: &str) -> Option<String> {
    data.get(key)?.as_str().filter(|s| name_ok(s)).map(str::to_string)
}

/// "12.3400 SYM" into (units, precision, symbol).
fn asset(text: &str) -> Option<(i64, usize, String)> {
    let (number, symbol) = text.split_once(' ')?;
    if symbol.is_empty() || !symbol.chars().all(|c| c.is_ascii_uppercase()) || symbol.len() > 7 {
        return None;
    }
    let (int, frac) = number.split_once('.').unwrap_or((number, ""));
    if int.is_empty() || !int.chars().all(|c| c.is_ascii_digit()) || !frac.chars().all(|c| c.is_ascii_digit()) {
        return None;
    }
    let units: i64 = format!("{int}{frac}").parse().ok()?;
    Some((units, frac.len(), symbol.to_string()))
}

fn eos(text: &str) -> Option<i64> {
    match asset(text)? {
        (units, 4, sym) if sym == "EOS" => Some(units),
        _ => None,
    }
}

fn first_actor(trace: &Value) -> Option<String> {
    trace["authorizers"].as_array()?.first()?["actor"].as_str().map(str::to_string)
}

fn is_primary(t: &Value) -> bool {
    t["receiver"] == t["contract"]
}

fn failed(t: &Value) -> bool {
    !t["error"].is_null()
}

fn terms(text: &str, into: &mut BTreeMap<String, u64>) {
    for word in text.to_lowercase().split(|c: char| !c.is_alphanumeric()) {
        if word.chars().count() >= 2 {
            *into.entry(word.to_string()).or_insert(0) += 1;
        }
    }
}

fn ranked(counts: &BTreeMap<String, u64>) -> Vec<(String, u64)> {
    let mut v: Vec<(String, u64)> = counts.iter().map(|(k, c)| (k.clone(), *c)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

fn div(a: u64, b: u64) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

fn histogram(values: &[u64], max_exp: u32) -> Value {
    let mut counts = vec![0u64; max_exp as usize + 2];
    for &v in values {
        let slot = if v == 0 {
            0
        } else {
            let mut exp = 0u32;
            let mut x = v;
            while x >= 10 {
                x /= 10;
                exp += 1;
            }
            (exp.min(max_exp) + 1) as usize
        };
        counts[slot] += 1;
    }
    let mut bins = vec![json!({"lower": 0, "upper": 1, "count": counts[0]})];
    for exp in 0..max_exp {
        bins.push(json!({"lower": 10u64.pow(exp), "upper": 10u64.pow(exp + 1), "count": counts[exp as usize + 1]}));
    }
    bins.push(json!({"lower": 10u64.pow(max_exp), "upper": null, "count": counts[max_exp as usize + 1]}));
    Value::Array(bins)
}

/// Per-bucket integer cells; reals are derived at the end.
#[derive(Default)]
struct Series {
    cells: BTreeMap<u64, Vec<u64>>,
}

impl Series {
    fn add(&mut self, block: u64, bucket: u64, width: usize, col: usize, by: u64) {
        let cell = self.cells.entry((block - 1) / bucket).or_insert_with(|| vec![0; width]);
        cell[col] += by;
    }

    fn rows(&self, bucket: u64, width: usize, shape: impl Fn(&[u64]) -> Vec<Value>) -> Vec<Value> {
        let (Some(first), Some(last)) = (self.cells.keys().next(), self.cells.keys().last()) else {
            return vec![];
        };
        let zero = vec![0; width];
        (*first..=*last)
            .map(|i| json!({"bucket_start": i * bucket + 1, "values": shape(self.cells.get(&i).unwrap_or(&zero))}))
            .collect()
    }
}

/// Everything re-derived from one raw directory.
pub struct Derived {
    pub rows: BTreeMap<String, u64>,
    pub anomalies: BTreeMap<String, u64>,
    pub token_contracts: BTreeSet<String>,
    pub summary: BTreeMap<String, Value>,
    pub series: BTreeMap<String, Value>,
    pub histograms: BTreeMap<String, Value>,
    pub function_ranking: Value,
    pub memo_terms: BTreeMap<String, Value>,
}

pub fn derive(dir: &Path, bucket: u64) -> Derived {
    let blocks = raw_records(dir, "blocks");
    let traces = raw_records(dir, "traces");
    let receipts = raw_records(dir, "receipts");
    let mut anomalies: BTreeMap<String, u64> = BTreeMap::new();
    let mut anomaly = |reason: &str| *anomalies.entry(reason.to_string()).or_insert(0) += 1;

    // D1
    let mut receipt_of: HashMap<(String, u64), &Value> = HashMap::new();
    let mut receipt_order: Vec<(String, u64)> = Vec::new();
    for r in &receipts {
        let key = (r["tx_id"].as_str().unwrap().to_string(), r["block_num"].as_u64().unwrap());
        if receipt_of.insert(key.clone(), r).is_none() {
            receipt_order.push(key);
        }
    }
    let mut used: HashSet<(String, u64)> = HashSet::new();
    let (mut n_tx, mut n_deferred, mut n_actions, mut cpu, mut net) = (0u64, 0u64, 0u64, 0u64, 0u64);
    let mut producers = BTreeSet::new();
    let mut d1 = Series::default();
    for b in &blocks {
        let num = b["block_num"].as_u64().unwrap();
        producers.insert(b["producer"].as_str().unwrap().to_string());
        d1.add(num, bucket, 6, 0, 1);
        for t in b["transactions"].as_array().unwrap() {
            let key = (t["tx_id"].as_str().unwrap().to_string(), num);
            let receipt = receipt_of.get(&key);
            if receipt.is_some() {
                used.insert(key);
            }
            let usage = |field: &str| match (t[field].as_u64(), receipt) {
                (Some(v), _) => Some(v),
                (None, Some(r)) => r[field].as_u64(),
                (None, None) => None,
            };
            let (c, w) = match (usage("cpu_usage_us"), usage("net_usage_words")) {
                (Some(c), Some(w)) => (c, w),
                _ => {
                    anomaly("d1_receipt_missing");
                    (0, 0)
                }
            };
            let deferred = t["is_deferred"].as_bool().unwrap() as u64;
            let actions = t["actions"].as_array().unwrap().len() as u64;
            n_tx += 1;
            n_deferred += deferred;
            n_actions += actions;
            cpu += c;
            net += w;
            for (col, by) in [(1, 1), (2, actions), (3, deferred), (4, c), (5, w)] {
                d1.add(num, bucket, 6, col, by);
            }
        }
    }
    for key in &receipt_order {
        if !used.contains(key) {
            anomaly("d1_unjoinable_receipt");
        }
    }

    // token detection over the whole range first
    let mut latest: BTreeMap<String, bool> = BTreeMap::new();
    for t in &traces {
        if t["contract"] != "eosio" || t["function"] != "setcode" || !is_primary(t) || failed(t) {
            continue;
        }
        let (Some(account), Some(code)) = (name_field(&t["data"], "account"), t["data"]["code"].as_str()) else {
            continue;
        };
        let token = if code.is_empty() {
            false
        } else if let Some(abi) = t["data"]["abi"].as_array() {
            ["create", "issue", "transfer"].iter().all(|f| abi.iter().any(|v| v == f))
        } else {
            anomaly("d5_missing_abi");
            false
        };
        latest.insert(account, token);
    }
    let token_contracts: BTreeSet<String> = latest
        .into_iter()
        .filter(|(a, token)| *token && !SYSTEM.contains(&a.as_str()))
        .map(|(a, _)| a)
        .collect();

    let (mut internal, mut external, mut total_units, mut max_units) = (0u64, 0u64, 0u64, 0i64);
    let mut d2_accounts = BTreeSet::new();
    let mut d2_amounts = Vec::new();
    let mut d2_terms = BTreeMap::new();
    let mut d2 = Series::default();

    let (mut setcode, mut setempty, mut first_deploys, mut hex_total) = (0u64, 0u64, 0u64, 0u64);
    let mut deployed = BTreeSet::new();
    let mut code_sizes = Vec::new();
    let mut d3 = Series::default();

    let (mut invocations, mut inv_errors) = (0u64, 0u64);
    let (mut authorizers, mut inv_contracts) = (BTreeSet::new(), BTreeSet::new());
    let mut functions: BTreeMap<String, u64> = BTreeMap::new();
    let mut d4 = Series::default();

    let mut created: BTreeMap<(String, String), usize> = BTreeMap::new();
    let (mut token_rows, mut token_transfers) = (0u64, 0u64);
    let (mut holders, mut token_owners) = (BTreeSet::new(), BTreeSet::new());
    let mut d5_terms = BTreeMap::new();
    let mut d5 = Series::default();

    let mut new_accounts = HashSet::new();
    let mut creators = BTreeSet::new();
    let mut d6 = Series::default();

    let mut d7_counts: BTreeMap<&str, u64> = RESOURCE.iter().map(|(a, _)| (*a, 0)).collect();
    let mut d7_units: BTreeMap<&str, u64> = RESOURCE.iter().map(|(a, _)| (*a, 0)).collect();
    let mut d7 = Series::default();

    for t in &traces {
        let block = t["block_num"].as_u64().unwrap();
        let contract = t["contract"].as_str().unwrap();
        let function = t["function"].as_str().unwrap();
        let data = &t["data"];
        let primary = is_primary(t);
        let top = t["parent_seq"].is_null();

        // D2
        if contract == "eosio.token" && function == "transfer" && primary {
            if failed(t) {
                anomaly("d2_failed_action");
            } else {
                let memo = match data.get("memo") {
                    None => Some(String::new()),
                    Some(v) => v.as_str().map(str::to_string),
                };
                let parsed = (
                    name_field(data, "from"),
                    name_field(data, "to"),
                    data["quantity"].as_str().and_then(eos),
                    memo,
                );
                match parsed {
                    (Some(from), Some(to), Some(units), Some(memo)) => {
                        let col = if top { 1 } else { 0 };
                        if top {
                            external += 1;
                        } else {
                            internal += 1;
                        }
                        total_units += units as u64;
                        max_units = max_units.max(units);
                        d2_accounts.insert(from);
                        d2_accounts.insert(to);
                        d2_amounts.push(units as u64);
                        terms(&memo, &mut d2_terms);
                        d2.add(block, bucket, 4, col, 1);
                        d2.add(block, bucket, 4, col + 2, units as u64);
                    }
                    _ => anomaly("d2_malformed_transfer"),
                }
            }
        }

        // D3
        if contract == "eosio" && function == "setcode" && primary {
            if failed(t) {
                anomaly("d3_failed_action");
            } else if let Some(account) = name_field(data, "account") {
                match data["code"].as_str() {
                    None => anomaly("d3_missing_code"),
                    Some(code) if code.len() % 2 != 0 || !code.chars().all(|c| c.is_ascii_hexdigit()) => {
                        anomaly("d3_invalid_code_hex")
                    }
                    Some("") => {
                        setempty += 1;
                        d3.add(block, bucket, 2, 1, 1);
                    }
                    Some(code) => {
                        setcode += 1;
                        hex_total += code.len() as u64;
                        code_sizes.push(code.len() as u64);
                        first_deploys += deployed.insert(account) as u64;
                        d3.add(block, bucket, 2, 0, 1);
                    }
                }
            } else {
                anomaly("d3_missing_account");
            }
        }

        // D4
        if top && primary && !SYSTEM.contains(&contract) {
            invocations += 1;
            inv_errors += failed(t) as u64;
            if let Some(a) = first_actor(t) {
                authorizers.insert(a);
            }
            inv_contracts.insert(contract.to_string());
            *functions.entry(function.to_string()).or_insert(0) += 1;
            d4.add(block, bucket, 2, 0, 1);
            d4.add(block, bucket, 2, 1, failed(t) as u64);
        }

        // D5
        if token_contracts.contains(contract) && primary && (function == "create" || function == "transfer") {
            if failed(t) {
                anomaly("d5_failed_action");
            } else if function == "create" {
                match (name_field(data, "issuer"), data["maximum_supply"].as_str().and_then(asset)) {
                    (Some(_), Some((_, precision, symbol))) => {
                        let key = (contract.to_string(), symbol);
                        if created.contains_key(&key) {
                            anomaly("d5_duplicate_token");
                        } else {
                            created.insert(key, precision);
                            token_rows += 1;
                            token_owners.insert(contract.to_string());
                        }
                    }
                    _ => anomaly("d5_malformed_create"),
                }
            } else {
                match (
                    name_field(data, "from"),
                    name_field(data, "to"),
                    data["quantity"].as_str().and_then(asset),
                ) {
                    (Some(from), Some(to), Some((_, precision, symbol))) => {
                        match created.get(&(contract.to_string(), symbol)) {
                            None => anomaly("d5_unknown_symbol"),
                            Some(p) if *p != precision => anomaly("d5_precision_mismatch"),
                            Some(_) => {
                                token_transfers += 1;
                                holders.insert(from);
                                holders.insert(to);
                                terms(data["memo"].as_str().unwrap_or(""), &mut d5_terms);
                                d5.add(block, bucket, 1, 0, 1);
                            }
                        }
                    }
                    _ => anomaly("d5_malformed_transfer"),
                }
            }
        }

        // D6
        if contract == "eosio" && function == "newaccount" && primary {
            if failed(t) {
                anomaly("d6_failed_action");
            } else {
                match (first_actor(t), name_field(data, "name")) {
                    (None, _) => anomaly("d6_missing_creator"),
                    (_, None) => anomaly("d6_invalid_account_name"),
                    (Some(creator), Some(name)) => {
                        if new_accounts.insert(name) {
                            creators.insert(creator);
                            d6.add(block, bucket, 1, 0, 1);
                        } else {
                            anomaly("d6_duplicate_account");
                        }
                    }
                }
            }
        }

        // D7
        if contract == "eosio" && primary {
            if let Some((action, category)) = RESOURCE.iter().find(|(a, _)| *a == function) {
                if failed(t) {
                    anomaly("d7_failed_action");
                } else {
                    match (first_actor(t), data["quantity"].as_str().and_then(eos)) {
                        (Some(_), Some(units)) => {
                            *d7_counts.get_mut(action).unwrap() += 1;
                            *d7_units.get_mut(action).unwrap() += units as u64;
                            let col = ["CPU", "NET", "RAM", "REX"].iter().position(|c| c == category).unwrap();
                            d7.add(block, bucket, 5, col, 1);
                            d7.add(block, bucket, 5, 4, units as u64);
                        }
                        _ => anomaly("d7_malformed_resource_action"),
                    }
                }
            }
        }
    }

    let n_blocks = blocks.len() as u64;
    let creations = new_accounts.len() as u64;
    let mut summary = BTreeMap::new();
    let mean_tx = div(n_tx, n_blocks);
    summary.insert(
        "d1".into(),
        json!({
            "blocks": n_blocks, "transactions": n_tx, "deferred_transactions": n_deferred,
            "actions": n_actions, "producers": producers.len(), "mean_tx_per_block": mean_tx,
            "tps": mean_tx / 0.5, "mean_cpu_us_per_block": div(cpu, n_blocks),
            "mean_net_words_per_block": div(net, n_blocks),
        }),
    );
    summary.insert(
        "d2".into(),
        json!({
            "internal_transfers": internal, "external_transfers": external,
            "accounts": d2_accounts.len(), "total_amount_units": total_units,
            "mean_amount_units": div(total_units, internal + external), "max_amount_units": max_units,
        }),
    );
    summary.insert(
        "d3".into(),
        json!({
            "contracts": deployed.len(), "setcode_actions": setcode, "setemptycode_actions": setempty,
            "first_deploys": first_deploys, "mean_hex_code_size": div(hex_total, setcode),
        }),
    );
    let ranking: Vec<Value> = ranked(&functions)
        .into_iter()
        .map(|(f, c)| json!({"function": f, "count": c, "share": div(c, invocations)}))
        .collect();
    let top: Vec<Value> = ranking.iter().take(10).cloned().collect();
    let top_count: u64 = top.iter().map(|r| r["count"].as_u64().unwrap()).sum();
    summary.insert(
        "d4".into(),
        json!({
            "invocations": invocations, "failed_invocations": inv_errors,
            "authorizers": authorizers.len(), "contracts": inv_contracts.len(),
            "functions": functions.len(), "top_functions": top,
            "top_functions_share": div(top_count, invocations),
        }),
    );
    summary.insert(
        "d5".into(),
        json!({
            "token_contracts": token_owners.len(), "tokens": token_rows,
            "token_transfers": token_transfers, "holders": holders.len(),
        }),
    );
    summary.insert(
        "d6".into(),
        json!({
            "creations": creations, "creators": creators.len(),
            "mean_accounts_per_creator": div(creations, creators.len() as u64),
        }),
    );
    let mut categories: BTreeMap<&str, u64> = ["CPU", "NET", "RAM", "REX"].iter().map(|c| (*c, 0)).collect();
    for (action, category) in RESOURCE {
        *categories.get_mut(category).unwrap() += d7_counts[action];
    }
    summary.insert(
        "d7".into(),
        json!({"actions": d7_counts, "categories": categories, "eos_units_by_action": d7_units}),
    );

    let counts = |c: &[u64]| c.iter().map(|v| json!(v)).collect::<Vec<_>>();
    let mut series = BTreeMap::new();
    let mut put = |id: &str, columns: &[&str], rows: Vec<Value>| {
        series.insert(id.to_string(), json!({"bucket_size": bucket, "columns": columns, "rows": rows}));
    };
    put(
        "d1",
        &["block_count", "tx_count", "action_count", "deferred_count", "tps", "cpu_ms_per_block", "net_words_per_block"],
        d1.rows(bucket, 6, |c| {
            vec![
                json!(c[0]),
                json!(c[1]),
                json!(c[2]),
                json!(c[3]),
                json!(div(c[1], c[0]) / 0.5),
                json!(div(c[4], c[0]) / 1000.0),
                json!(div(c[5], c[0])),
            ]
        }),
    );
    put(
        "d2",
        &["internal_count", "external_count", "internal_units", "external_units"],
        d2.rows(bucket, 4, counts),
    );
    put("d3", &["setcode_count", "setemptycode_count"], d3.rows(bucket, 2, counts));
    put("d4", &["invocation_count", "error_count"], d4.rows(bucket, 2, counts));
    put("d5", &["token_transfer_count"], d5.rows(bucket, 1, counts));
    put("d6", &["creation_count"], d6.rows(bucket, 1, counts));
    put(
        "d7",
        &["cpu_count", "net_count", "ram_count", "rex_count", "eos_units"],
        d7.rows(bucket, 5, counts),
    );

    let mut histograms = BTreeMap::new();
    histograms.insert("d2_amount".to_string(), histogram(&d2_amounts, 12));
    histograms.insert("d3_code_size".to_string(), histogram(&code_sizes, 9));

    let mut memo_terms = BTreeMap::new();
    memo_terms.insert("d2".to_string(), json!(ranked(&d2_terms)));
    memo_terms.insert("d5".to_string(), json!(ranked(&d5_terms)));

    let n_anomalies: u64 = anomalies.values().sum();
    let mut rows = BTreeMap::new();
    for (file, n) in [
        ("d1_blocks.csv", n_blocks),
        ("d1_transactions.csv", n_tx),
        ("d1_actions.csv", n_actions),
        ("d2_transfers.csv", internal + external),
        ("d3_contracts.csv", setcode + setempty),
        ("d4_invocations.csv", invocations),
        ("d5_tokens.csv", token_rows),
        ("d5_token_transfers.csv", token_transfers),
        ("d6_accounts.csv", creations),
        ("d7_resources.csv", d7_counts.values().sum()),
        ("anomalies.csv", n_anomalies),
    ] {
        rows.insert(file.to_string(), n);
    }

    Derived {
        rows,
        anomalies,
        token_contracts,
        summary,
        series,
        histograms,
        function_ranking: Value::Array(ranking),
        memo_terms,
    }
}

/// Walks two JSON values and lists every differing leaf by path.
pub fn diff(path: &str, expected: &Value, actual: &Value, out: &mut Vec<String>) {
    match (expected, actual) {
        (Value::Object(a), Value::Object(b)) => {
            let keys: BTreeSet<&String> = a.keys().chain(b.keys()).collect();
            for k in keys {
                diff(
                    &format!("{path}.{k}"),
                    a.get(k).unwrap_or(&Value::Null),
                    b.get(k).unwrap_or(&Value::Null),
                    out,
                );
            }
        }
        (Value::Array(a), Value::Array(b)) if a.len() == b.len() => {
            for (i, (x, y)) in a.iter().zip(b).enumerate() {
                diff(&format!("{path}[{i}]"), x, y, out);
            }
        }
        (a, b) if numbers_equal(a, b) || a == b => {}
        (a, b) => out.push(format!("{path}: expected {a}, got {b}")),
    }
}

fn numbers_equal(a: &Value, b: &Value) -> bool {
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => match (x.as_u64(), y.as_u64(), x.as_f64(), y.as_f64()) {
            (Some(p), Some(q), _, _) => p == q,
            (_, _, Some(p), Some(q)) => p == q && (x.is_f64() == y.is_f64()),
            _ => false,
        },
        _ => false,
    }
}

/// Compares a re-derivation with a manifest; returns one line per mismatch.
pub fn check_manifest(derived: &Derived, manifest: &Value) -> Vec<String> {
    let mut out = Vec::new();
    diff("rows", &json!(derived.rows), &manifest["rows"], &mut out);
    diff("anomalies", &json!(derived.anomalies), &manifest["anomalies"], &mut out);
    diff("token_contracts", &json!(derived.token_contracts), &manifest["token_contracts"], &mut out);
    diff("stats.summary", &json!(derived.summary), &manifest["stats"]["summary"], &mut out);
    diff("stats.series", &json!(derived.series), &manifest["stats"]["series"], &mut out);
    diff("stats.histograms", &json!(derived.histograms), &manifest["stats"]["histograms"], &mut out);
    diff("stats.function_ranking", &derived.function_ranking, &manifest["stats"]["function_ranking"], &mut out);
    diff("stats.memo_terms", &json!(derived.memo_terms), &manifest["stats"]["memo_terms"], &mut out);
    out
}

pub fn load_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

/// Row counts of every CSV in `dir`, header excluded, counting records
/// rather than lines so quoted newlines do not inflate the count.
pub fn csv_rows(dir: &Path) -> BTreeMap<String, u64> {
    let mut out = BTreeMap::new();
    for e in fs::read_dir(dir).unwrap() {
        let path = e.unwrap().path();
        if path.extension().and_then(|x| x.to_str()) != Some("csv") {
            continue;
        }
        let text = fs::read_to_string(&path).unwrap();
        let (mut records, mut quoted) = (0u64, false);
        for c in text.chars() {
            match c {
                '"' => quoted = !quoted,
                '\n' if !quoted => records += 1,
                _ => {}
            }
        }
        out.insert(path.file_name().unwrap().to_str().unwrap().to_string(), records.saturating_sub(1));
    }
    out
}

pub fn object(map: &BTreeMap<String, u64>) -> Map<String, Value> {
    map.iter().map(|(k, v)| (k.clone(), json!(v))).collect()
}
