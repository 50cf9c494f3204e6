use std::path::Path;
use std::process::Command;

use dta_bench::{ExperimentConfig, ExperimentKind};

fn dta() -> Command {
    Command::new(env!("CARGO_BIN_EXE_dta"))
}

#[test]
fn shipped_configs_parse() {
    let root = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut seen = 0;
    for dir in [root.clone(), root.join("full")] {
        for entry in std::fs::read_dir(&dir).unwrap() {
            let path = entry.unwrap().path();
            if path.extension().is_none_or(|e| e != "json") {
                continue;
            }
            let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
            let kind: ExperimentKind = serde_json::from_value(v["kind"].clone()).unwrap();
            ExperimentConfig::from_file(kind, &path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            seen += 1;
        }
    }
    assert!(seen >= 10, "only {seen} configs");
}

#[test]
fn train_writes_every_output() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let status = dta()
        .args(["train", "--kind", "decode_capacity", "--load", "1", "--trials", "2", "--seed", "4"])
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap()
        .status;
    assert!(status.success());
    let records = std::fs::read_to_string(out.join("records.csv")).unwrap();
    // header plus two trials for each of the two preset methods
    assert_eq!(records.lines().count(), 1 + 2 * 2);
    assert!(records.starts_with("experiment,method,trial,seed,load,converged"));
    for f in ["curves.csv", "timings.csv", "summary.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
}

#[test]
fn config_file_and_flags_combine() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"n_channels": 50, "max_epochs": 5, "load_max": 2, "methods": ["dta-psp"]}"#).unwrap();
    let out = tmp.path().join("run");
    let output = dta()
        .args(["calpha", "--trials", "2", "--threads", "1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&output.stdout).unwrap();
    assert_eq!(summary["trials"], 2);
    assert!(summary["nu_in_tau"].as_f64().unwrap() > 0.0);
}

#[test]
fn unknown_keys_are_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    std::fs::write(&cfg, r#"{"epochs": 5}"#).unwrap();
    let status = dta()
        .args(["iris", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path())
        .output()
        .unwrap()
        .status;
    assert!(!status.success());
}
