mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn xeos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xeos"))
        .args(args)
        .env_remove("XEOS_CONFIG")
        .output()
        .unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

fn synth(dir: &Path, seed: u64, blocks: u64) {
    let out = xeos(&["synth", "--output", p(dir), "--seed", &seed.to_string(), "--blocks", &blocks.to_string()]);
    assert!(out.status.success(), "{}", stderr(&out));
}

fn extract(raw: &Path, out_dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["extract", "--input", p(raw), "--output", p(out_dir)];
    args.extend_from_slice(extra);
    xeos(&args)
}

#[test]
fn extract_report_matches_manifest() {
    let raw = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    synth(raw.path(), 4, 150);
    let res = extract(raw.path(), out.path(), &["--report", "-"]);
    assert!(res.status.success(), "{}", stderr(&res));
    let report: Value = serde_json::from_slice(&res.stdout).expect("stdout carries only the report");
    let manifest = common::load_json(&raw.path().join("manifest.json"));
    for (file, rows) in manifest["rows"].as_object().unwrap() {
        let reported = if file == "anomalies.csv" {
            report["anomalies"]["rows"].clone()
        } else {
            report["datasets"]
                .as_object()
                .unwrap()
                .values()
                .flat_map(|d| d["files"].as_array().unwrap())
                .find(|f| f["file"] == *file)
                .map(|f| f["rows"].clone())
                .unwrap()
        };
        assert_eq!(&reported, rows, "{file}");
    }
    let validated = xeos(&["validate", "--input", p(out.path())]);
    assert_eq!(validated.status.code(), Some(0), "{}", stderr(&validated));
}

#[test]
fn missing_input_is_an_io_error_naming_the_path() {
    let out = tempfile::tempdir().unwrap();
    let missing = out.path().join("no-such-raw-dir");
    let res = extract(&missing, &out.path().join("o"), &[]);
    assert_eq!(res.status.code(), Some(4));
    assert!(stderr(&res).contains("no-such-raw-dir"), "{}", stderr(&res));
}

#[test]
fn dataset_selection_limits_outputs() {
    let raw = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    synth(raw.path(), 5, 40);
    let res = extract(raw.path(), out.path(), &["--datasets", "d2"]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert_eq!(listing(out.path()), ["anomalies.csv", "d2_transfers.csv"]);
}

#[test]
fn uppercase_account_is_one_violation() {
    let raw = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    synth(raw.path(), 6, 200);
    assert!(extract(raw.path(), out.path(), &["--datasets", "d6"]).status.success());
    let path = out.path().join("d6_accounts.csv");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(str::to_string).collect();
    assert!(lines.len() > 3, "fixture needs some accounts");
    let mut cells: Vec<&str> = lines[2].split(',').collect();
    cells[2] = "Alice";
    lines[2] = cells.join(",");
    fs::write(&path, lines.join("\n") + "\n").unwrap();

    let res = xeos(&["validate", "--input", p(out.path()), "--report", "-"]);
    assert_eq!(res.status.code(), Some(3));
    let report: Value = serde_json::from_slice(&res.stdout).unwrap();
    let violations = report["violations"].as_array().unwrap();
    assert_eq!(violations.len(), 1, "{violations:?}");
    assert_eq!(violations[0]["file"], "d6_accounts.csv");
    assert_eq!(violations[0]["line"], 3);
    assert!(stderr(&res).contains("d6_accounts.csv:3:"));
}

#[test]
fn empty_directory_has_nothing_to_validate() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(xeos(&["validate", "--input", p(dir.path())]).status.code(), Some(2));
}

#[test]
fn stats_on_d1_only_and_single_bucket() {
    let raw = tempfile::tempdir().unwrap();
    let data = tempfile::tempdir().unwrap();
    let stats = tempfile::tempdir().unwrap();
    synth(raw.path(), 7, 120);
    assert!(extract(raw.path(), data.path(), &[]).status.success());
    let res = xeos(&[
        "stats",
        "--input",
        p(data.path()),
        "--output",
        p(stats.path()),
        "--datasets",
        "d1",
        "--bucket-size",
        "120",
    ]);
    assert!(res.status.success(), "{}", stderr(&res));
    assert_eq!(listing(stats.path()), ["stats_d1_series.csv", "summary.json"]);
    let summary = common::load_json(&stats.path().join("summary.json"));
    assert_eq!(summary.as_object().unwrap().keys().collect::<Vec<_>>(), ["d1"]);
    let series = fs::read_to_string(stats.path().join("stats_d1_series.csv")).unwrap();
    assert_eq!(series.lines().count(), 2, "{series}");
    // the single bucket carries the summary totals
    let row: Vec<&str> = series.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[2], summary["d1"]["transactions"].to_string());
}

#[test]
fn stats_summary_equals_manifest() {
    let raw = tempfile::tempdir().unwrap();
    let data = tempfile::tempdir().unwrap();
    let stats = tempfile::tempdir().unwrap();
    synth(raw.path(), 8, 150);
    assert!(extract(raw.path(), data.path(), &[]).status.success());
    let res = xeos(&["stats", "--input", p(data.path()), "--output", p(stats.path())]);
    assert!(res.status.success(), "{}", stderr(&res));
    let manifest = common::load_json(&raw.path().join("manifest.json"));
    let summary = common::load_json(&stats.path().join("summary.json"));
    let mut mismatches = Vec::new();
    common::diff("summary", &manifest["stats"]["summary"], &summary, &mut mismatches);
    assert!(mismatches.is_empty(), "{mismatches:#?}");
}

#[test]
fn config_file_from_environment() {
    let raw = tempfile::tempdir().unwrap();
    let work = tempfile::tempdir().unwrap();
    synth(raw.path(), 9, 30);
    let out_dir = work.path().join("out");
    let cfg = work.path().join("run.json");
    fs::write(
        &cfg,
        serde_json::json!({"input_dir": raw.path(), "output_dir": out_dir, "datasets": ["d6", "d7"]}).to_string(),
    )
    .unwrap();
    let res = Command::new(env!("CARGO_BIN_EXE_xeos"))
        .args(["extract"])
        .env("XEOS_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", stderr(&res));
    assert_eq!(listing(&out_dir), ["anomalies.csv", "d6_accounts.csv", "d7_resources.csv"]);

    // flags override the file
    let res = Command::new(env!("CARGO_BIN_EXE_xeos"))
        .args(["extract", "--datasets", "d3"])
        .env("XEOS_CONFIG", &cfg)
        .output()
        .unwrap();
    assert!(res.status.success(), "{}", stderr(&res));
    assert!(out_dir.join("d3_contracts.csv").is_file());
}

#[test]
fn unknown_config_keys_are_rejected() {
    let work = tempfile::tempdir().unwrap();
    let cfg = work.path().join("run.json");
    fs::write(&cfg, r#"{"input_dirr": "x"}"#).unwrap();
    let res = xeos(&["extract", "--config", p(&cfg)]);
    assert_eq!(res.status.code(), Some(2));
}

#[test]
fn strict_mode_fails_on_anomalies() {
    let raw = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    synth(raw.path(), 1, 200);
    let manifest = common::load_json(&raw.path().join("manifest.json"));
    assert!(manifest["rows"]["anomalies.csv"].as_u64().unwrap() > 0);
    let lenient = extract(raw.path(), out.path(), &[]);
    assert_eq!(lenient.status.code(), Some(0));
    let strict = extract(raw.path(), &out.path().join("strict"), &["--strict"]);
    assert_eq!(strict.status.code(), Some(3), "{}", stderr(&strict));
}

#[test]
fn malformed_raw_line_is_a_parse_error() {
    let raw = tempfile::tempdir().unwrap();
    let out = tempfile::tempdir().unwrap();
    synth(raw.path(), 10, 20);
    let traces = raw.path().join("traces_1-20.jsonl");
    let mut text = fs::read_to_string(&traces).unwrap();
    text.push_str("{not json\n");
    fs::write(&traces, text).unwrap();
    let res = extract(raw.path(), out.path(), &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(stderr(&res).contains("traces_1-20.jsonl"), "{}", stderr(&res));
}

#[test]
fn bench_reports_both_writers_and_keeps_the_output_dir() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("keep.txt"), "mine").unwrap();
    let res = xeos(&["bench", "--output", p(dir.path()), "--records", "2000", "--report", "-"]);
    assert!(res.status.success(), "{}", stderr(&res));
    let report: Value = serde_json::from_slice(&res.stdout).unwrap();
    assert_eq!(report["records"], 2000);
    assert!(report["buffered_rps"].as_f64().unwrap() > 0.0);
    assert_eq!(listing(dir.path()), ["keep.txt"]);
}
