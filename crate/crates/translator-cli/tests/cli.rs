//! End-to-end tests of the `translator` binary: exit-code contract, config
//! validation messages, output plumbing and provenance.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_translator"))
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin()
        .args(args)
        .env_remove("TRANSLATOR_OUT_DIR")
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

#[test]
fn passing_experiment_exits_zero_and_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["run", "decay-schedule", "--out", "res"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = fs::read_to_string(tmp.path().join("res/report.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&report).unwrap();
    assert_eq!(v["experiment"], "decay-schedule");
    assert_eq!(v["pass"], true);
    assert!(v["config_hash"].as_str().unwrap().len() == 64);
    // manifest names exist on disk
    for f in v["manifest"].as_array().unwrap() {
        assert!(tmp.path().join("res").join(f.as_str().unwrap()).exists());
    }
}

#[test]
fn failing_check_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    // an impossible tolerance turns a healthy run into a check failure
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"params": {"lambda_tol": 1e-12}}"#,
    )
    .unwrap();
    let out = run_in(
        tmp.path(),
        &["ode-asymptotics", "--config", "cfg.json", "--out", "res"],
    );
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("[FAIL] lambda_end_dev"), "{stdout}");
}

#[test]
fn unknown_key_exits_two_with_suggestion() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("cfg.json"), r#"{"params": {"gamna_amp": 0.1}}"#).unwrap();
    let out = run_in(tmp.path(), &["ode-asymptotics", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("gamna_amp") && stderr.contains("gamma_amp"),
        "{stderr}"
    );
}

#[test]
fn all_violations_enumerated() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"formt": "json", "params": {"tol": -2.0, "gamna_amp": 0.1}}"#,
    )
    .unwrap();
    let out = run_in(tmp.path(), &["ode-asymptotics", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("3 problem(s)"), "{stderr}");
    assert!(stderr.contains("params.tol"), "{stderr}");
    assert!(stderr.contains("formt"), "{stderr}");
}

#[test]
fn q_one_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("cfg.json"), r#"{"params": {"q": 1}}"#).unwrap();
    let out = run_in(tmp.path(), &["run", "decay-schedule", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.q"));
}

#[test]
fn runtime_error_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    // a z-window too short for the symmetry footprint is a runtime error,
    // not a config error: the config itself is well-formed
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"params": {"z_lo": -5.0, "z_hi": 5.0, "n_z": 11}}"#,
    )
    .unwrap();
    let out = run_in(tmp.path(), &["symmetry-check", "--config", "cfg.json"]);
    assert_eq!(
        out.status.code(),
        Some(3),
        "stdout: {} stderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn env_var_overrides_out_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["run", "decay-schedule", "--out", "flagdir"])
        .env("TRANSLATOR_OUT_DIR", "envdir")
        .current_dir(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(tmp.path().join("envdir/report.json").exists());
    assert!(!tmp.path().join("flagdir").exists());
}

#[test]
fn validate_prints_normalized_config_and_hash() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(tmp.path().join("cfg.json"), r#"{"params": {"s0": 12.0}}"#).unwrap();
    let out = run_in(
        tmp.path(),
        &["validate", "ode-asymptotics", "--config", "cfg.json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("\"s0\": 12.0"), "{stdout}");
    assert!(stdout.contains("config_hash: "), "{stdout}");
}

#[test]
fn run_reads_experiment_from_config() {
    let tmp = tempfile::tempdir().unwrap();
    fs::write(
        tmp.path().join("cfg.json"),
        r#"{"experiment": "decay-schedule", "out_dir": "res"}"#,
    )
    .unwrap();
    let out = run_in(tmp.path(), &["run", "--config", "cfg.json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(tmp.path().join("res/report.json").exists());
}

#[test]
fn rerun_reproduces_report_bytes() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["run", "growth-lemma", "--out", "res", "--threads", "1"];
    assert_eq!(run_in(tmp.path(), &args).status.code(), Some(0));
    let first = fs::read(tmp.path().join("res/report.json")).unwrap();
    assert_eq!(run_in(tmp.path(), &args).status.code(), Some(0));
    let second = fs::read(tmp.path().join("res/report.json")).unwrap();
    assert_eq!(first, second);
}

#[test]
fn csv_format_emits_plot_ready_artifacts() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(
        tmp.path(),
        &["run", "growth-lemma", "--out", "res", "--format", "csv"],
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(tmp.path().join("res/trajectory.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "s,phi,psi,lambda,mu");
    // every field parses as a float: '.' decimal separator, no locale forms
    let mut rows = 0;
    for line in lines {
        for field in line.split(',') {
            field.parse::<f64>().unwrap_or_else(|_| panic!("bad field {field:?}"));
        }
        rows += 1;
    }
    assert!(rows > 10, "expected trajectory rows, got {rows}");
}

#[test]
fn unknown_experiment_suggested_and_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_in(tmp.path(), &["run", "growt-lemma"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("growth-lemma"));
}
