use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fade(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fade"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = fade(dir, args);
    assert!(
        out.status.success(),
        "fade {} failed: {}",
        args.join(" "),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn json(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Generates, splits and trains a small run in `dir`.
fn small_run(dir: &Path) {
    ok(dir, &["gen-synth", "--preset", "tiny", "--bias", "0.5", "--seed", "1", "--out", "d.jsonl"]);
    ok(dir, &["split", "--data", "d.jsonl", "--out", "m.json", "--seed", "1"]);
    ok(
        dir,
        &["train", "--data", "d.jsonl", "--split", "m.json", "--out", "run", "--set", "train.epochs=3", "--set", "encoder.hidden_dim=8"],
    );
}

#[test]
fn pipeline_writes_contract_files() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    small_run(dir);
    for f in ["run/target.ckpt", "run/event_only.ckpt", "run/config.txt", "run/log.json"] {
        assert!(dir.join(f).exists(), "{f}");
    }
    let manifest = json(dir.join("m.json"));
    for part in ["train", "val", "test"] {
        assert!(manifest[part].is_array(), "{part}");
    }
    let log = json(dir.join("run/log.json"));
    assert_eq!(log["target"].as_array().unwrap().len(), 3);
    assert!(log["event_only"][0]["loss_cl"].as_f64() == Some(0.0));
    let config = std::fs::read_to_string(dir.join("run/config.txt")).unwrap();
    assert!(config.contains("train.epochs = 3"));

    ok(dir, &["eval", "--run", "run", "--data", "d.jsonl", "--split", "m.json"]);
    let report = json(dir.join("run/report.json"));
    assert!(report["accuracy"].as_f64().unwrap() >= 0.0);
    assert_eq!(report["per_class_f1"].as_array().unwrap().len(), 2);
    assert!(report["beta"].is_number());

    ok(dir, &["predict", "--run", "run", "--data", "d.jsonl", "--beta", "0.3", "--out", "p.jsonl"]);
    let lines = std::fs::read_to_string(dir.join("p.jsonl")).unwrap();
    assert_eq!(lines.lines().count(), 32);
    let first: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert!(first["predicted"].is_u64() && first["debiased_logits"].is_array());
}

#[test]
fn beta_zero_matches_target_only() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    small_run(dir);
    let common = ["--run", "run", "--data", "d.jsonl", "--split", "m.json"];
    let mut zero = vec!["eval", "--beta", "0", "--out", "zero.json"];
    zero.extend(common);
    ok(dir, &zero);
    let mut plain = vec!["eval", "--target-only", "--out", "plain.json"];
    plain.extend(common);
    ok(dir, &plain);
    let (a, b) = (json(dir.join("zero.json")), json(dir.join("plain.json")));
    assert_eq!(a["accuracy"], b["accuracy"]);
    assert_eq!(a["confusion"], b["confusion"]);
    assert!(b.get("beta").is_none());
}

#[test]
fn ablate_writes_table_and_json() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let table = ok(
        dir,
        &["ablate", "--preset", "tiny", "--seeds", "2", "--variants", "full,beta0", "--out", "abl", "--set", "train.epochs=2"],
    );
    assert!(table.contains("full") && table.contains("beta0"));
    let report = json(dir.join("abl/ablation.json"));
    assert_eq!(report["seeds"].as_array().unwrap().len(), 2);
}

#[test]
fn failures_map_to_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path();
    let code = |args: &[&str]| fade(dir, args).status.code();

    assert_eq!(code(&["gen-synth", "--preset", "nope", "--out", "x.jsonl"]), Some(2));
    assert_eq!(code(&["gen-synth", "--bias", "1.5", "--out", "x.jsonl"]), Some(2));
    assert_eq!(code(&["split", "--data", "missing.jsonl", "--out", "m.json"]), Some(3));

    std::fs::write(dir.join("bad.jsonl"), "{\"classes\":[\"N\"],\"feature_dim\":2}\n{\"id\":1}\n").unwrap();
    let out = fade(dir, &["split", "--data", "bad.jsonl", "--out", "m.json"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    ok(dir, &["gen-synth", "--preset", "tiny", "--out", "d.jsonl"]);
    assert_eq!(code(&["split", "--data", "d.jsonl", "--out", "m.json", "--set", "train.alhpa=1"]), Some(2));
    assert_eq!(code(&["split", "--data", "d.jsonl", "--out", "m.json", "--config", "none.txt"]), Some(3));
}
