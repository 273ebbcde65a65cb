//! The `nsw` binary end to end: exit codes, determinism, output formats.

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn nsw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nsw")).args(args).output().unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn solve_json(name: &str, instance: &str, extra: &[&str]) -> (i32, Value) {
    let path = scratch(name, instance);
    let mut args = vec!["solve", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = nsw(&args);
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json)
}

#[test]
fn gen_writes_identical_files_for_identical_arguments() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let a = dir.join("gen_a.json");
    let b = dir.join("gen_b.json");
    for path in [&a, &b] {
        let out = nsw(&["gen", "uniform", "3", "6", "--seed", "1", "--output", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
    }
    let bytes = std::fs::read(&a).unwrap();
    assert_eq!(bytes, std::fs::read(&b).unwrap());
    let instance = nsw::load_instance(&bytes).unwrap();
    assert_eq!((instance.num_agents(), instance.num_items()), (3, 6));
}

#[test]
fn gen_rejects_unknown_kind() {
    assert_eq!(nsw(&["gen", "unknown", "2", "3"]).status.code(), Some(3));
}

#[test]
fn solve_identity() {
    let (code, report) = solve_json(
        "identity.json",
        r#"{"num_agents": 2, "num_items": 2, "values": [[1, 0], [0, 1]]}"#,
        &[],
    );
    assert_eq!(code, 0);
    assert_eq!(report["final_geomean"], 1.0);
    assert_eq!(report["allocation"]["assignment"], serde_json::json!([0, 1]));
}

#[test]
fn solve_meets_the_factor_against_the_optimum() {
    let (code, report) = solve_json(
        "small.json",
        r#"{"num_agents": 2, "num_items": 3, "values": [[2, 1, 0], [0, 1, 2]]}"#,
        &["--trace", "--seed", "3"],
    );
    assert_eq!(code, 0);
    let geomean = report["final_geomean"].as_f64().unwrap();
    assert!(geomean >= 6f64.sqrt() / std::f64::consts::E);
    assert_eq!(report["trace"]["steps"].as_array().unwrap().len(), 3);
    assert_eq!(report["sample"]["seed"], 3);
    assert!(report["guarantee"]["final_at_least_expected"].as_bool().unwrap());
}

#[test]
fn solve_exit_codes() {
    let zero_row = r#"{"num_agents": 2, "num_items": 2, "values": [[1, 1], [0, 0]]}"#;
    assert_eq!(solve_json("zero_row.json", zero_row, &[]).0, 2);
    let negative = r#"{"num_agents": 1, "num_items": 1, "values": [[-1]]}"#;
    assert_eq!(solve_json("negative.json", negative, &[]).0, 3);
    let ragged = r#"{"num_agents": 2, "num_items": 1, "values": [[1]]}"#;
    assert_eq!(solve_json("ragged.json", ragged, &[]).0, 3);
    assert_eq!(nsw(&["solve", "/nonexistent/instance.json"]).status.code(), Some(3));
    let fine = r#"{"num_agents": 1, "num_items": 1, "values": [[1]]}"#;
    assert_eq!(solve_json("bad_tol.json", fine, &["--tol", "-1"]).0, 3);
}

#[test]
fn verify_suites_exit_zero() {
    let out = nsw(&["verify", "etomk", "--m-max", "30"]);
    assert_eq!(out.status.code(), Some(0));
    let out = nsw(&["verify", "counting", "--seeds", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let out = nsw(&["verify", "gurvits", "--seeds", "50", "--oracle"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["min_margin"].as_f64().unwrap() > -1e-6);
}

#[test]
fn bench_grid_is_deterministic_and_meets_the_factor() {
    let args = ["bench", "--n-range", "2..3", "--m-range", "4..8", "--seeds", "10"];
    let first = nsw(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, nsw(&args).stdout);
    let mut reader = csv::Reader::from_reader(first.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let ratio = headers.iter().position(|h| h == "ratio").unwrap();
    let rows: Vec<csv::StringRecord> = reader.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 100);
    for row in &rows {
        let r: f64 = row[ratio].parse().unwrap();
        assert!(r >= (-1.0f64).exp(), "{row:?}");
    }
}

#[test]
fn thread_count_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_nsw"))
        .args(["verify", "etomk", "--m-max", "5"])
        .env("NSW_NUM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let out = Command::new(env!("CARGO_BIN_EXE_nsw"))
        .args(["bench", "--n-range", "2", "--m-range", "3", "--seeds", "3"])
        .env("NSW_NUM_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(out.stdout, nsw(&["bench", "--n-range", "2", "--m-range", "3", "--seeds", "3"]).stdout);
}
