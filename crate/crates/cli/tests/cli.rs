use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cavity-parity"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

#[test]
fn lists_experiments() {
    let out = run(&["list-experiments"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in ["encode-parity", "erasure-prepare", "toric-ground-state", "pump-cycles"] {
        assert!(text.contains(name), "{name} missing");
    }
}

#[test]
fn validates_shipped_configs() {
    let c = config("fig2.conf");
    let out = run(&["validate", "--config", c.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn run_writes_manifest_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let c = config("toric8.conf");
    let out = run(&["run", "--config", c.to_str().unwrap(), "--seed", "5", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let manifest = std::fs::read_to_string(dir.path().join("manifest.json")).unwrap();
    assert!(manifest.contains("\"seed\": 5"));
    assert!(manifest.contains("config_hash"));
    assert!(dir.path().join("generators.csv").exists());
}

#[test]
fn sweep_writes_one_table() {
    let dir = tempfile::tempdir().unwrap();
    let c = config("pump_theta_sweep.conf");
    let out = run(&["sweep", "--config", c.to_str().unwrap(), "--workers", "2", "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = std::fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.conf");
    std::fs::write(&bad, "experiment = toric-ground-state\nwarp = 9\n").unwrap();
    assert_eq!(run(&["validate", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
    std::fs::write(&bad, "experiment = no-such-thing\n").unwrap();
    assert_eq!(run(&["run", "--config", bad.to_str().unwrap()]).status.code(), Some(1));
    let missing = dir.path().join("absent.conf");
    assert_ne!(run(&["run", "--config", missing.to_str().unwrap()]).status.code(), Some(0));
}
