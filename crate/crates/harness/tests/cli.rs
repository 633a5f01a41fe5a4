use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use perfdfo::presets;
use perfdfo::runner::sha256_hex;
use perfdfo::ExperimentConfig;
use serde_json::Value;

fn perfdfo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perfdfo")).args(args).output().expect("binary runs")
}

fn small_quartic(dir: &Path) -> std::path::PathBuf {
    let mut cfg = presets::experiment("quartic").unwrap();
    cfg.trials = 2;
    cfg.epochs = 300;
    cfg.max_rows = Some(50);
    let path = dir.join("quartic.json");
    fs::write(&path, cfg.to_json()).unwrap();
    path
}

#[test]
fn presets_list_and_dump_round_trip() {
    let out = perfdfo(&["presets", "list"]);
    assert!(out.status.success());
    let listing = String::from_utf8(out.stdout).unwrap();
    for name in presets::EXPERIMENTS.iter().chain(presets::DIAGNOSTICS.iter()) {
        assert!(listing.contains(name), "{name} missing");
    }
    for name in presets::EXPERIMENTS {
        let out = perfdfo(&["presets", "dump", name]);
        assert!(out.status.success());
        let cfg = ExperimentConfig::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap();
        assert_eq!(cfg.name, name);
        cfg.resolve().unwrap();
    }
    assert_eq!(perfdfo(&["presets", "dump", "nope"]).status.code(), Some(2));
}

#[test]
fn run_writes_traces_aggregates_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_quartic(dir.path());
    let out = dir.path().join("out");
    let status = perfdfo(&["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", "2"]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));

    let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["version"], 1);
    assert_eq!(manifest["seeds"], serde_json::json!([20230, 20231]));
    let algos = manifest["algorithms"].as_array().unwrap();
    assert_eq!(algos.len(), 6);
    let budget = algos[0]["planned_samples"].as_u64().unwrap();
    for a in algos {
        assert_eq!(a["completed"], 2);
        assert!(a["planned_samples"].as_u64().unwrap() >= budget.min(1));
    }
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 6 * 2 + 6);
    for f in files {
        let bytes = fs::read(out.join(f["path"].as_str().unwrap())).unwrap();
        assert_eq!(sha256_hex(&bytes), f["sha256"].as_str().unwrap());
    }

    let trace = fs::read_to_string(out.join("dfo_lambda_0.25/trial_0.csv")).unwrap();
    let header = trace.lines().next().unwrap();
    assert_eq!(header, "trial,epoch,samples_cum,risk,grad_norm_sq,run_avg_grad_norm_sq,theta_0");
    assert!(trace.lines().count() <= 51);
    assert!(trace.lines().last().unwrap().split(',').nth(1) == Some("300"));
    let agg = fs::read_to_string(out.join("dfo_lambda_0.25_aggregate.csv")).unwrap();
    assert!(agg.starts_with("epoch,samples_mean,risk_mean,risk_std"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = small_quartic(dir.path());
    let mut hashes = Vec::new();
    for (name, workers) in [("a", "1"), ("b", "3")] {
        let out = dir.path().join(name);
        let res = perfdfo(&["run", "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", workers]);
        assert!(res.status.success());
        let manifest: Value = serde_json::from_str(&fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap();
        hashes.push((manifest["config_sha256"].clone(), manifest["files"].clone()));
    }
    assert_eq!(hashes[0], hashes[1]);
}

#[test]
fn config_errors_exit_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = presets::experiment("pricing").unwrap();
    cfg.environment.sigma1 = Some(1.0);
    let path = dir.path().join("bad.json");
    fs::write(&path, cfg.to_json()).unwrap();
    let out = perfdfo(&["run", "--config", path.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma1"));

    fs::write(&path, "{\"version\": 1, \"name\": \"x\"").unwrap();
    let out = perfdfo(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let mut cfg = presets::experiment("quartic").unwrap();
    cfg.trials = 0;
    fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = perfdfo(&["run", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("trials"));
}

#[test]
fn missing_config_exits_with_code_three() {
    let out = perfdfo(&["run", "--config", "/nonexistent/perfdfo.json"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn total_divergence_exits_with_code_four_after_writing() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = presets::experiment("pricing").unwrap();
    cfg.algorithms.truncate(1);
    cfg.algorithms[0].schedule.eta0 = Some(50.0);
    cfg.algorithms[0].schedule.delta0 = Some(0.01);
    cfg.trials = 2;
    cfg.epochs = 200;
    let path = dir.path().join("diverge.json");
    fs::write(&path, cfg.to_json()).unwrap();
    let out_dir = dir.path().join("o");
    let out = perfdfo(&["run", "--config", path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(out_dir.join("manifest.json").exists());
    assert!(out_dir.join("dfo_lambda_0.25/trial_0.csv").exists());
    assert!(!out_dir.join("dfo_lambda_0.25_aggregate.csv").exists());
}

#[test]
fn diag_writes_moment_csv() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = presets::diagnostic("diag_quartic").unwrap();
    for c in &mut cfg.checks {
        c.n = 20_000;
    }
    let path = dir.path().join("diag.json");
    fs::write(&path, cfg.to_json()).unwrap();
    let csv = dir.path().join("m.csv");
    let out = perfdfo(&["diag", "--config", path.to_str().unwrap(), "--out", csv.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(csv).unwrap();
    assert_eq!(text.lines().count(), 1 + 3);
    assert!(text.contains("two_point_II"));
}
