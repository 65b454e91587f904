//! Black-box tests of the compiled binary: output shapes, exit codes,
//! config merging, and rerun determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sheffer-zeros"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("sheffer-zeros-test-{}-{}", std::process::id(), name));
    p
}

#[test]
fn q_table_matches_published_csv() {
    let out = run(&["q-table"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let items = report["items"].as_array().unwrap();
    assert_eq!(items.len(), 5);
    let q4: Vec<&str> = items[4]["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(q4, ["0", "-16", "32", "-32", "16"]);
    assert_eq!(report["failed"], 0);
    assert_eq!(report["command"], "q-table");
}

#[test]
fn degenerate_alpha_is_a_usage_error() {
    let out = run(&["roots", "--alpha", "0,1", "--n", "4"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("degenerate"));
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["roots", "--frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_format_is_a_usage_error() {
    let out = run(&["q-table", "--format", "yaml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reruns_are_byte_identical_modulo_wall_time() {
    let o = tmp("det");
    let mut csvs = Vec::new();
    let mut jsons = Vec::new();
    for _ in 0..2 {
        let out = run(&["roots", "--n", "12", "--out", o.to_str().unwrap()]);
        assert!(out.status.success());
        csvs.push(std::fs::read(format!("{}.csv", o.display())).unwrap());
        jsons.push(std::fs::read(format!("{}.json", o.display())).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let mut j1: serde_json::Value = serde_json::from_slice(&jsons[0]).unwrap();
    let mut j2: serde_json::Value = serde_json::from_slice(&jsons[1]).unwrap();
    // wall time is the only field allowed to differ
    j1["wall_ms"] = serde_json::Value::Null;
    j2["wall_ms"] = serde_json::Value::Null;
    assert_eq!(j1, j2);
    let _ = std::fs::remove_file(format!("{}.csv", o.display()));
    let _ = std::fs::remove_file(format!("{}.json", o.display()));
}

#[test]
fn config_file_merges_and_flags_win() {
    let cfg = tmp("cfg.txt");
    std::fs::write(&cfg, "# comment\nn = 6\npstar = 1\np = 0\n").unwrap();
    let out = run(&["roots", "--config", cfg.to_str().unwrap(), "--n", "4"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["config"]["n"], "4");
    assert_eq!(report["config"]["pstar"], "1");
    let item = &report["items"][0];
    assert_eq!(item["n"], 4);
    assert_eq!(item["roots"].as_array().unwrap().len(), 4);
    let _ = std::fs::remove_file(&cfg);
}

#[test]
fn counterexample_exit_code_is_one() {
    // a deliberately unreachable KS tolerance turns a healthy run into a failure
    let out = run(&["density", "--n", "100", "--tol", "1e-12"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn svg_is_written_on_request() {
    let o = tmp("svg");
    let out = run(&["roots", "--n", "6", "--svg", "--out", o.to_str().unwrap()]);
    assert!(out.status.success());
    let svg = std::fs::read_to_string(format!("{}.svg", o.display())).unwrap();
    assert!(svg.starts_with("<svg"));
    assert!(svg.contains("circle"));
    for ext in ["csv", "json", "svg"] {
        let _ = std::fs::remove_file(format!("{}.{}", o.display(), ext));
    }
}
