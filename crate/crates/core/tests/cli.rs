//! End-to-end checks of the `hems` binary: exit codes, artifacts, flags.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .canonicalize()
        .unwrap()
}

fn hems(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hems"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

fn stderr(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn optimize_writes_plan_with_24_entries() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir();
    let out = hems(
        &[
            "optimize",
            "--consumption",
            data.join("consumption.csv").to_str().unwrap(),
            "--generation",
            data.join("generation.csv").to_str().unwrap(),
            "--config",
            data.join("system.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("planned cost:"));

    let plan: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("plan.json")).unwrap())
            .unwrap();
    assert_eq!(plan["hours"].as_array().unwrap().len(), 24);
    assert!(plan["planned_cost_eur"].is_number());
}

#[test]
fn optimize_missing_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir();
    let out = hems(
        &[
            "optimize",
            "--generation",
            data.join("generation.csv").to_str().unwrap(),
            "--config",
            data.join("system.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("--consumption"));
}

#[test]
fn optimize_short_csv_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir();
    let short: String = (1..=23).map(|h| format!("{h},100\n")).collect();
    let short_path = dir.path().join("short.csv");
    std::fs::write(&short_path, short).unwrap();
    let out = hems(
        &[
            "optimize",
            "--consumption",
            short_path.to_str().unwrap(),
            "--generation",
            data.join("generation.csv").to_str().unwrap(),
            "--config",
            data.join("system.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("malformed"));
}

#[test]
fn simulate_zero_error_prints_zero_gap() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir();
    let out = hems(
        &[
            "simulate",
            "--consumption",
            data.join("consumption.csv").to_str().unwrap(),
            "--generation",
            data.join("generation.csv").to_str().unwrap(),
            "--config",
            data.join("system.json").to_str().unwrap(),
            "--realized",
            data.join("generation.csv").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("cost gap:      0.0000 EUR"), "stdout: {text}");
    assert!(dir.path().join("outcome.json").exists());
}

#[test]
fn simulate_perturbed_gap_matches_costs() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir();
    let out = hems(
        &[
            "simulate",
            "--consumption",
            data.join("consumption.csv").to_str().unwrap(),
            "--generation",
            data.join("generation.csv").to_str().unwrap(),
            "--config",
            data.join("system.json").to_str().unwrap(),
            "--realized",
            data.join("generation_cloudy.csv").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("outcome.json")).unwrap())
            .unwrap();
    let planned = report["plan"]["planned_cost_eur"].as_f64().unwrap();
    let realized = report["outcome"]["realized_cost_eur"].as_f64().unwrap();
    let gap = report["cost_gap_eur"].as_f64().unwrap();
    assert!((gap - (realized - planned)).abs() < 1e-12);
    assert!(gap > 0.0, "losing generation must cost money");
}

#[test]
fn simulate_missing_realized_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir();
    let out = hems(
        &[
            "simulate",
            "--consumption",
            data.join("consumption.csv").to_str().unwrap(),
            "--generation",
            data.join("generation.csv").to_str().unwrap(),
            "--config",
            data.join("system.json").to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sa_smoke_config_produces_all_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir();
    let out = hems(
        &[
            "sa",
            "--config",
            data.join("experiment_smoke.json").to_str().unwrap(),
            "--out-dir",
            dir.path().to_str().unwrap(),
        ],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    for name in [
        "first_order.csv",
        "total_order.csv",
        "second_order_0_5000-8000.csv",
        "summary.json",
    ] {
        assert!(dir.path().join(name).exists(), "{name} missing");
    }
    assert!(stdout(&out).contains("top total-order inputs"));

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary["evaluations"].as_u64().unwrap(), 8 * 34);
    assert_eq!(summary["input_count"].as_u64().unwrap(), 16);
}

#[test]
fn sa_out_dir_env_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let outputs = dir.path().join("from-env");
    let data = data_dir();
    let out = Command::new(env!("CARGO_BIN_EXE_hems"))
        .args([
            "sa",
            "--config",
            data.join("experiment_smoke.json").to_str().unwrap(),
        ])
        .env("HEMS_SA_OUT_DIR", &outputs)
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(outputs.join("first_order.csv").exists());
}

#[test]
fn sa_invalid_halfwidth_is_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir();
    let text = std::fs::read_to_string(data.join("experiment_smoke.json"))
        .unwrap()
        .replace("\"error_halfwidth\": 0.3", "\"error_halfwidth\": -0.2")
        .replace("consumption.csv", data.join("consumption.csv").to_str().unwrap())
        .replace("irradiance.csv", data.join("irradiance.csv").to_str().unwrap());
    let config = dir.path().join("bad.json");
    std::fs::write(&config, text).unwrap();
    let out = hems(&["sa", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("error_halfwidth"));
}

#[test]
fn sobol_test_default_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = hems(&["sobol-test"], dir.path());
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("[pass]"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn sobol_test_tiny_n_warns_without_failing() {
    let dir = tempfile::tempdir().unwrap();
    let out = hems(&["sobol-test", "--n", "8"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("not meaningful"));
    assert!(stdout(&out).contains("[skipped]"));
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = hems(&["sobol-test", "--frobnicate"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn rerunning_overwrites_identical_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let data = data_dir();
    let consumption = data.join("consumption.csv");
    let generation = data.join("generation.csv");
    let config = data.join("system.json");
    let args = [
        "optimize",
        "--consumption",
        consumption.to_str().unwrap(),
        "--generation",
        generation.to_str().unwrap(),
        "--config",
        config.to_str().unwrap(),
    ];
    assert_eq!(hems(&args, dir.path()).status.code(), Some(0));
    let first = std::fs::read(dir.path().join("plan.json")).unwrap();
    assert_eq!(hems(&args, dir.path()).status.code(), Some(0));
    let second = std::fs::read(dir.path().join("plan.json")).unwrap();
    assert_eq!(first, second);
}
