//! End-to-end checks of the command-line surface: files, exit codes,
//! determinism, and flag/config precedence.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_vdw-phase"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("vdw-phase-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn landscape_writes_consistent_json_and_is_deterministic() {
    let dir = tmp_dir("landscape");
    let status = bin()
        .args(["landscape", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let json = read(&dir.join("landscape.json"));
    let value: serde_json::Value = serde_json::from_str(&json).unwrap();
    let l = &value["landscape"];
    let alpha0 = l["alpha0"].as_f64().unwrap();
    let alpha = l["alpha"].as_f64().unwrap();
    let beta = l["beta"].as_f64().unwrap();
    let beta0 = l["beta0"].as_f64().unwrap();
    assert!(alpha0 < alpha && alpha < beta && beta < beta0);
    assert!(value["ordering_ok"].as_bool().unwrap());
    let isotherm = read(&dir.join("isotherm.csv"));
    assert!(isotherm.starts_with("v,p\n"));
    assert!(isotherm.lines().count() > 2000);

    // byte-identical rerun
    let status = bin()
        .args(["landscape", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    assert_eq!(json, read(&dir.join("landscape.json")));
}

#[test]
fn supercritical_temperature_exits_with_invalid_input() {
    let dir = tmp_dir("supercritical");
    let out = bin()
        .args(["landscape", "--theta", "1.1", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("supercritical"), "stderr: {stderr}");
    // fail-fast: no partial outputs
    assert!(!dir.join("landscape.json").exists());
}

#[test]
fn sharp_midpoint_has_equal_phase_lengths() {
    let dir = tmp_dir("sharp");
    let status = bin().args(["sharp", "--out"]).arg(&dir).status().unwrap();
    assert!(status.success());
    let value: serde_json::Value = serde_json::from_str(&read(&dir.join("sharp.json"))).unwrap();
    assert_eq!(value["verdict"], "two-phase");
    assert!((value["l1"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((value["l2"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!(value["corner_conditions_ok"].as_bool().unwrap());

    // a stable mean volume produces the constant verdict
    let out_dir = tmp_dir("sharp-stable");
    let status = bin()
        .args(["sharp", "--vbar", "6.0", "--out"])
        .arg(&out_dir)
        .status()
        .unwrap();
    assert!(status.success());
    let value: serde_json::Value =
        serde_json::from_str(&read(&out_dir.join("sharp.json"))).unwrap();
    assert_eq!(value["verdict"], "stable/single-phase");
}

#[test]
fn solve_reports_residuals_and_both_orientations_share_levels() {
    let dir_v = tmp_dir("solve-valley");
    let status = bin()
        .args(["solve", "--epsilon", "0.05", "--kind", "valley", "--out"])
        .arg(&dir_v)
        .status()
        .unwrap();
    assert!(status.success());
    let valley: serde_json::Value =
        serde_json::from_str(&read(&dir_v.join("solution.json"))).unwrap();
    let residuals = &valley["solution"]["residuals"];
    assert!(residuals["period"].as_f64().unwrap() < 1e-8);
    assert!(residuals["mass"].as_f64().unwrap() < 1e-8);

    let dir_p = tmp_dir("solve-peak");
    let status = bin()
        .args(["solve", "--epsilon", "0.05", "--kind", "peak", "--out"])
        .arg(&dir_p)
        .status()
        .unwrap();
    assert!(status.success());
    let peak: serde_json::Value =
        serde_json::from_str(&read(&dir_p.join("solution.json"))).unwrap();
    let sv = valley["solution"]["first_integral"]["sigma"]
        .as_f64()
        .unwrap();
    let sp = peak["solution"]["first_integral"]["sigma"]
        .as_f64()
        .unwrap();
    assert!((sv - sp).abs() < 1e-13);
    assert_eq!(peak["solution"]["kind"], "SinglePeak");
    assert_eq!(valley["solution"]["kind"], "SingleValley");

    let csv = read(&dir_v.join("solution.csv"));
    assert!(csv.starts_with("x,y,v\n"));
    assert_eq!(csv.lines().count(), 2048 + 2);
}

#[test]
fn solve_above_threshold_exits_no_solution() {
    let dir = tmp_dir("solve-trivial");
    // 1.1 x the triviality threshold of the default landscape
    let out = bin()
        .args(["solve", "--epsilon", "0.4014", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("threshold") || stderr.contains("no nonconstant"),
        "stderr: {stderr}"
    );
}

#[test]
fn sweep_writes_fit_summary() {
    let dir = tmp_dir("sweep");
    let status = bin()
        .args([
            "sweep",
            "--eps-start",
            "0.06",
            "--eps-end",
            "0.015",
            "--eps-ratio",
            "0.8",
            "--out",
        ])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let value: serde_json::Value = serde_json::from_str(&read(&dir.join("sweep.json"))).unwrap();
    assert_eq!(value["truncated"], false);
    assert!(value["decay_fit"]["c1"].as_f64().unwrap() > 0.0);
    assert!(value["decay_fit"]["r2_1"].as_f64().unwrap() > 0.99);
    let csv = read(&dir.join("sweep.csv"));
    assert_eq!(
        csv.lines().count(),
        1 + value["rungs_solved"].as_u64().unwrap() as usize
    );
}

#[test]
fn unreachable_sweep_start_sets_warning_flag_and_exits_zero() {
    let dir = tmp_dir("sweep-truncated");
    // a mean volume deep in the metastable band is unsolvable at the top
    // rung, so the ladder truncates; that is a warning, not a failure
    let out = bin()
        .args([
            "sweep",
            "--vbar",
            "2.5",
            "--eps-start",
            "0.2",
            "--eps-end",
            "0.1",
            "--out",
        ])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&read(&dir.join("sweep.json"))).unwrap();
    assert_eq!(value["truncated"], true);
    assert!(value["warning"].as_str().unwrap().contains("truncated"));
}

#[test]
fn stability_cutoff_matches_band() {
    let dir = tmp_dir("stability");
    let status = bin()
        .args(["stability", "--vbar", "1.2", "--epsilon", "0.05", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let value: serde_json::Value =
        serde_json::from_str(&read(&dir.join("stability.json"))).unwrap();
    let cutoff = value["cutoff"].as_f64().unwrap();
    let largest = value["largest_unstable"].as_u64().unwrap();
    assert!(cutoff > 0.0);
    assert_eq!(largest, cutoff.ceil() as u64 - 1);
    let csv = read(&dir.join("spectrum.csv"));
    assert_eq!(csv.lines().count(), 202);
}

#[test]
fn energy_ordering_places_two_interface_lowest() {
    let dir = tmp_dir("ordering");
    let status = bin()
        .args(["energy-ordering", "--epsilon", "0.04", "--N", "2", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let value: serde_json::Value =
        serde_json::from_str(&read(&dir.join("energy-ordering.json"))).unwrap();
    assert_eq!(value["report"]["ordering_ok"], true);
}

#[test]
fn config_file_is_used_and_flags_take_precedence() {
    let dir = tmp_dir("config");
    std::fs::create_dir_all(&dir).unwrap();
    let config_path = dir.join("run.json");
    std::fs::write(&config_path, r#"{"theta": 0.9, "grid": 256}"#).unwrap();

    let status = bin()
        .args(["landscape", "--config"])
        .arg(&config_path)
        .args(["--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let value: serde_json::Value =
        serde_json::from_str(&read(&dir.join("landscape.json"))).unwrap();
    assert_eq!(value["config"]["theta"].as_f64().unwrap(), 0.9);
    assert_eq!(value["config"]["grid"].as_u64().unwrap(), 256);

    // flag wins over the file
    let status = bin()
        .args(["landscape", "--config"])
        .arg(&config_path)
        .args(["--theta", "0.8", "--out"])
        .arg(&dir)
        .status()
        .unwrap();
    assert!(status.success());
    let value: serde_json::Value =
        serde_json::from_str(&read(&dir.join("landscape.json"))).unwrap();
    assert_eq!(value["config"]["theta"].as_f64().unwrap(), 0.8);

    // unknown fields fail fast
    std::fs::write(&config_path, r#"{"thta": 0.9}"#).unwrap();
    let out = bin()
        .args(["landscape", "--config"])
        .arg(&config_path)
        .args(["--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invalid_numeric_input_rejected_before_compute() {
    let dir = tmp_dir("invalid");
    for args in [
        vec!["solve", "--epsilon", "-0.1"],
        vec!["sweep", "--eps-ratio", "1.5"],
        vec!["sweep", "--eps-start", "0.01", "--eps-end", "0.05"],
        vec!["solve", "--grid", "16"],
    ] {
        let out = bin()
            .args(&args)
            .args(["--out"])
            .arg(&dir)
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
    }
    assert!(!dir.exists());
}
