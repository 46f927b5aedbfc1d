//! The installed binary: exit codes, output files and flag handling.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperconvex"))
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hyperconvex-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn passing_suite_exits_zero_and_writes_json() {
    let path = scratch("df.json");
    let out = bin().args(["verify", "--suite", "df", "--quiet", "--json"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let names: Vec<_> = v.as_array().unwrap().iter().map(|r| r["name"].as_str().unwrap().to_string()).collect();
    let mut sorted = names.clone();
    sorted.sort();
    assert_eq!(names, sorted);
    assert!(v.as_array().unwrap().iter().all(|r| r["runtime_ms"] == 0 && r["status"] == "pass"));
}

#[test]
fn failing_check_exits_one() {
    let out = bin().args(["ergodic", "boundary", "--samples", "2000", "--quiet"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_two() {
    let unknown = bin().args(["verify", "--suite", "everything"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&unknown.stderr).contains("ma, hyperconvex, df"));
    assert_eq!(bin().args(["area", "--samples", "-3"]).output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("--config").arg(scratch("missing.json")).arg("area").output().unwrap().status.code(), Some(2));
}

#[test]
fn csv_output_of_a_sweep() {
    let path = scratch("sweep.csv");
    let out = bin()
        .args(["df-sweep", "--eta-min", "0.4", "--eta-max", "0.6", "--step", "0.1", "--format", "json", "--csv"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&path).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(json[0]["schema"], 1);
}

#[test]
fn config_file_supplies_seed() {
    let cfg = scratch("cfg.json");
    std::fs::write(&cfg, r#"{"seed": 11, "samples": 1e4, "format": "json"}"#).unwrap();
    let a = bin().arg("--config").arg(&cfg).arg("area").output().unwrap();
    let b = bin().args(["--seed", "11", "--samples", "10000", "--format", "json", "area"]).output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
