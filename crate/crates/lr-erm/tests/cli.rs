//! End-to-end checks of the `lr-erm` binary: exit codes, output artifacts,
//! and byte-level determinism.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_lr-erm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary must launch")
}

fn write(path: &Path, text: &str) {
    fs::write(path, text).expect("scratch write");
}

fn solve_config(lambda: f64) -> String {
    format!(
        r#"{{
  "dictionary": {{"type": "monomial", "size": 2, "r": 2.0}},
  "regularizer": {{"r": 2.0, "eta": 1.0}},
  "loss": {{"kind": "power", "p": 2.0, "y_bound": 2.0}},
  "lambda": {lambda},
  "xs": [0.1, 0.3, 0.5, 0.7, 0.9],
  "ys": [0.2, 0.1, -0.1, 0.4, 0.5]
}}"#
    )
}

#[test]
fn solve_round_trip_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("solve.json");
    write(&cfg, &solve_config(0.5));
    let out_a = dir.path().join("a.json");
    let out_b = dir.path().join("b.json");

    let res = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out_a.to_str().unwrap()]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let res = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out_b.to_str().unwrap()]);
    assert!(res.status.success());

    let text_a = fs::read(&out_a).unwrap();
    let text_b = fs::read(&out_b).unwrap();
    assert_eq!(text_a, text_b, "repeat runs must be byte-identical");

    let v: serde_json::Value = serde_json::from_slice(&text_a).unwrap();
    assert_eq!(v["u"].as_array().unwrap().len(), 2);
    assert!(v["objective"].is_number());
    assert!(v["kkt_residual"].as_f64().unwrap() <= 1e-8);
    assert!(v["duality_gap"].is_number());
    assert!(v["converged"].as_bool().unwrap());
}

#[test]
fn consistency_emits_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cons.json");
    write(
        &cfg,
        r#"{
  "dictionary": {"type": "trig", "size": 3, "decay": 1.0, "r": 2.0},
  "regularizer": {"r": 2.0, "eta": 0.5},
  "true_u": [0.5, 0.3, -0.2],
  "noise_sigma": 0.2,
  "lambda0": 0.5,
  "gamma": 0.25,
  "n_grid": [16, 32],
  "seeds": [0, 1]
}"#,
    );
    let out = dir.path().join("runs.csv");
    let args = ["consistency", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--seed", "7"];
    let res = run(&args);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));

    let text = fs::read_to_string(&out).unwrap();
    let header = text.lines().next().unwrap();
    assert_eq!(
        header,
        "n,seed,lambda,excess_risk,u_dist,kkt_residual,radius_bound,within_radius"
    );
    assert_eq!(text.lines().count(), 1 + 4, "one row per (n, seed) cell");

    let meta_path = dir.path().join("runs.meta.json");
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&meta_path).unwrap()).unwrap();
    assert_eq!(meta["weak"], serde_json::Value::Bool(true));
    assert_eq!(meta["strong"], serde_json::Value::Bool(true));
    assert_eq!(meta["cells"], serde_json::json!(4));

    // same seed, fresh output path: bytes must match
    let out2 = dir.path().join("again.csv");
    let res = run(&["consistency", "--config", cfg.to_str().unwrap(), "--out", out2.to_str().unwrap(), "--seed", "7"]);
    assert!(res.status.success());
    assert_eq!(fs::read(&out).unwrap(), fs::read(&out2).unwrap());

    // a different master seed must produce different rows
    let out3 = dir.path().join("other.csv");
    let res = run(&["consistency", "--config", cfg.to_str().unwrap(), "--out", out3.to_str().unwrap(), "--seed", "8"]);
    assert!(res.status.success());
    assert_ne!(fs::read(&out).unwrap(), fs::read(&out3).unwrap());
}

#[test]
fn invalid_config_exits_1_naming_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    write(&cfg, &solve_config(-1.0));
    let out = dir.path().join("out.json");
    let res = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("lambda"), "stderr must name the offending field: {stderr}");
    assert!(!out.exists(), "no artifact on failure");
}

#[test]
fn malformed_json_reports_line_and_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.json");
    write(&cfg, "{\n  \"dictionary\": [,\n}");
    let out = dir.path().join("out.json");
    let res = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(
        stderr.contains("line") && stderr.contains("column"),
        "stderr must point into the file: {stderr}"
    );
}

#[test]
fn unknown_config_field_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("extra.json");
    let mut text = solve_config(0.5);
    text.insert_str(1, "\n  \"surprise\": 1,");
    write(&cfg, &text);
    let out = dir.path().join("out.json");
    let res = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("surprise"), "stderr must name the unknown field: {stderr}");
}

#[test]
fn strict_turns_nonconvergence_into_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hinge.json");
    write(
        &cfg,
        r#"{
  "dictionary": {"type": "monomial", "size": 2, "r": 2.0},
  "regularizer": {"r": 2.0, "eta": 1.0},
  "loss": {"kind": "hinge"},
  "lambda": 0.1,
  "xs": [0.1, 0.4, 0.6, 0.9],
  "ys": [1.0, 1.0, -1.0, -1.0],
  "tol": 1e-12,
  "max_iter": 3
}"#,
    );
    let out = dir.path().join("out.json");
    let res = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(res.status.code(), Some(0), "non-strict: warn but succeed");
    assert!(String::from_utf8_lossy(&res.stderr).contains("did not reach tolerance"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["converged"], serde_json::Value::Bool(false));

    let out2 = dir.path().join("out2.json");
    let res = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out2.to_str().unwrap(), "--strict"]);
    assert_eq!(res.status.code(), Some(2), "strict: non-convergence is fatal");
    assert!(out2.exists(), "the artifact is still written");
}

#[test]
fn sobolev_p2_diagonal_is_the_parabola() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("k.csv");
    let res = run(&["sobolev", "--p", "2", "--out", out.to_str().unwrap()]);
    assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
    let text = fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x,x2,value,diag,flux_residual,reproducing_residual");
    let mut rows = 0;
    for line in lines {
        let cols: Vec<f64> = line.split(',').map(|c| c.parse().unwrap()).collect();
        let (x, diag, flux, repro) = (cols[0], cols[3], cols[4], cols[5]);
        assert!((diag - x * (1.0 - x)).abs() <= 1e-14, "diag at x={x}");
        assert!(flux.abs() <= 1e-10, "flux residual at x={x}");
        assert!(repro.abs() <= 1e-10, "reproducing residual at x={x}");
        rows += 1;
    }
    assert!(rows > 0);
}
