//! End-to-end tests of the command-line interface: subcommand behavior,
//! exit codes, error prefixes and config precedence.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_polyak-lab"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not valid JSON: {e}\nstdout: {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

#[test]
fn enum_line_chords_exactly_two() {
    let out = run(&["enum", "--skeleton", "line", "--flavor", "chord-unsigned", "--exactly", "2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["count"], 3);
    assert_eq!(v["diagrams"].as_array().unwrap().len(), 3);
}

#[test]
fn verify_theorem1_order_three_circle() {
    let out = run(&["verify", "theorem1", "--order", "3", "--skeleton", "circle"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["schema"], "polyak-lab/cert/1");
    assert_eq!(v["status"], "PASS");
    assert_eq!(v["dims"]["gpv"], 2);
    assert_eq!(v["dims"]["virt"], 1);
    assert!(v["witnesses"].as_array().map(|w| !w.is_empty()).unwrap_or(false));
}

#[test]
fn eval_constant_functional() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("constant.json");
    std::fs::write(
        &path,
        r#"{"order":1,"skeleton":"circle","profile":"gpv","entries":[{"diagram":"c:as:","coeff":"1/1"}]}"#,
    )
    .unwrap();
    let out = run(&["eval", "--invariant", path.to_str().unwrap(), "--knot", "O1+,U2+,O2+,U1+"]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1/1");
}

#[test]
fn eval_rejects_bad_knot_with_positioned_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("constant.json");
    std::fs::write(
        &path,
        r#"{"order":1,"skeleton":"circle","entries":[{"diagram":"c:as:","coeff":"1/1"}]}"#,
    )
    .unwrap();
    let out = run(&["eval", "--invariant", path.to_str().unwrap(), "--knot", "O1+,U1-"]);
    assert_eq!(out.status.code(), Some(65));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error[65]:"), "{err}");
    assert!(err.contains("sign mismatch"), "{err}");
}

#[test]
fn usage_errors_exit_64() {
    let out = run(&["enum", "--skeleton", "line", "--flavor", "chord-unsigned"]);
    assert_eq!(out.status.code(), Some(64));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.starts_with("error[64]:"), "{err}");

    let out = run(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn ceiling_violations_exit_64() {
    let out = run(&[
        "enum",
        "--skeleton",
        "circle",
        "--flavor",
        "chord-unsigned",
        "--exactly",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(64));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ceiling"));
}

#[test]
fn witness_none_for_constant_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("constant.json");
    std::fs::write(
        &path,
        r#"{"order":1,"skeleton":"circle","entries":[{"diagram":"c:as:","coeff":"1/1"}]}"#,
    )
    .unwrap();
    let out = run(&["witness", "--invariant", path.to_str().unwrap(), "--max-crossings", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "null");
}

#[test]
fn relations_export_is_valid_json() {
    let out =
        run(&["relations", "--family", "2t", "--order", "2", "--skeleton", "line"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert!(v["ambient"].as_array().unwrap().len() == 3);
    assert!(!v["rows"].as_array().unwrap().is_empty());
}

#[test]
fn invariants_table_format() {
    let out = run(&[
        "invariants",
        "--order",
        "2",
        "--skeleton",
        "line",
        "--profile",
        "gpv",
        "--format",
        "table",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("dimension: 3"), "{text}");
}

#[test]
fn config_file_and_env_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("polyak-lab.toml");
    std::fs::write(&cfg, "format = \"table\"\nceiling = 6\n").unwrap();
    // config file selects table
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "enum", "--skeleton", "line", "--flavor", "chord-unsigned", "--exactly", "1"])
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("total: 1"));
    // env overrides config
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "enum", "--skeleton", "line", "--flavor", "chord-unsigned", "--exactly", "1"])
        .env("VKFT_FORMAT", "json")
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["count"], 1);
    // flag overrides env
    let out = bin()
        .args(["--config", cfg.to_str().unwrap(), "--format", "table", "enum", "--skeleton", "line", "--flavor", "chord-unsigned", "--exactly", "1"])
        .env("VKFT_FORMAT", "json")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("total: 1"));
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("out.json");
    let out = run(&[
        "--output",
        path.to_str().unwrap(),
        "enum",
        "--skeleton",
        "circle",
        "--flavor",
        "chord-unsigned",
        "--exactly",
        "2",
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    assert_eq!(v["count"], 2);
}

#[test]
fn verify_vanishing_certificates_and_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let args = [
        "--cache-dir",
        cache.to_str().unwrap(),
        "verify",
        "stability",
        "--skeleton",
        "circle",
        "--n-low",
        "1",
        "--n-high",
        "2",
    ];
    let first = run(&args);
    assert_eq!(first.status.code(), Some(0));
    assert!(Path::new(&cache).exists());
    let second = run(&args);
    assert_eq!(second.status.code(), Some(0));
    let a = stdout_json(&first);
    let b = stdout_json(&second);
    // identical up to runtime
    let strip = |mut v: serde_json::Value| {
        v.as_object_mut().unwrap().remove("runtime_ms");
        v
    };
    assert_eq!(strip(a), strip(b));
}

#[test]
fn verify_stderr_carries_progress_lines() {
    let out = run(&["verify", "caterpillar", "--order", "2", "--skeleton", "line"]);
    assert_eq!(out.status.code(), Some(0));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("caterpillar") && err.contains("PASS"), "{err}");
}

#[test]
fn verify_all_small_budget() {
    let out = run(&["verify", "all", "--order-max", "1"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    let certs = v.as_array().expect("array of certificates");
    assert!(certs.len() >= 8);
    for cert in certs {
        assert_eq!(cert["status"], "PASS", "{cert}");
        assert_eq!(cert["schema"], "polyak-lab/cert/1");
    }
    // one progress line per claim on stderr
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.lines().count(), certs.len());
}
