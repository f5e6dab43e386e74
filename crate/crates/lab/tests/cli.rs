//! Binary-level contract checks: exit codes, the machine-readable error
//! object on stderr, and dataset determinism across identical invocations.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qcorr-lab"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_error_kind(out: &Output) -> String {
    let text = String::from_utf8_lossy(&out.stderr);
    let line = text.lines().last().unwrap_or_default();
    let v: serde_json::Value =
        serde_json::from_str(line).unwrap_or_else(|_| panic!("stderr not a JSON object: {text}"));
    v["error"]["kind"]
        .as_str()
        .expect("error.kind string")
        .to_string()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(&["--definitely-not-a-flag"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_error_kind(&out), "usage");
}

#[test]
fn help_lists_subcommands_and_exits_clean() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "gen-data",
        "train-eval",
        "mismatch-study",
        "bench",
        "sdp-run",
        "phase-export",
    ] {
        assert!(text.contains(name), "help is missing {name}");
    }
}

#[test]
fn bad_noise_value_is_rejected() {
    let out = run(&["gen-data", "--noise", "gaussian"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_error_kind(&out), "invalid-parameter");
}

#[test]
fn train_eval_without_dataset_names_the_producer() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = run(&["train-eval", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_error_kind(&out), "missing-artifact");
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("gen-data"), "error should point at gen-data");
}

#[test]
fn phase_export_without_models_names_the_producer() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"train_size": 8, "test_size": 9, "n0": 2000}"#);
    let out_dir = dir.path().join("out");
    let gen = run(&[
        "gen-data",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(gen.status.code(), Some(0));
    let out = run(&["phase-export", "--model", "ann", "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_error_kind(&out), "missing-artifact");
    let text = String::from_utf8_lossy(&out.stderr);
    assert!(text.contains("train-eval"), "error should point at train-eval");
}

#[test]
fn sdp_dimension_guard_triggers() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"sdp": {"dim_a": 5, "dim_b": 5, "n_states": 3}}"#);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "sdp-run",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_error_kind(&out), "dimension-guard");
}

#[test]
fn gen_data_reports_counts_and_writes_both_splits() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"train_size": 40, "test_size": 41, "n0": 2000}"#);
    let out_dir = dir.path().join("out");
    let out = run(&[
        "gen-data",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("stdout is the JSON summary");
    assert_eq!(summary["train_rows"], 40);
    assert_eq!(summary["test_rows"], 41);
    for name in ["train.jsonl", "test.jsonl"] {
        let body = std::fs::read_to_string(out_dir.join(name)).unwrap();
        for line in body.lines() {
            let row: serde_json::Value = serde_json::from_str(line).unwrap();
            assert!(row["p"].is_number() && row["theta"].is_number());
        }
    }
}

#[test]
fn same_seed_is_byte_identical_and_seed_flag_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), r#"{"train_size": 30, "test_size": 31, "n0": 2000}"#);
    let outs = [dir.path().join("a"), dir.path().join("b"), dir.path().join("c")];
    for (out_dir, seed) in outs.iter().zip(["7", "7", "8"]) {
        let out = run(&[
            "gen-data",
            "--config",
            cfg.to_str().unwrap(),
            "--seed",
            seed,
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    for name in ["train.jsonl", "test.jsonl"] {
        let a = std::fs::read(outs[0].join(name)).unwrap();
        let b = std::fs::read(outs[1].join(name)).unwrap();
        let c = std::fs::read(outs[2].join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between identical seeds");
        assert_ne!(a, c, "{name} identical across different seeds");
    }
}
