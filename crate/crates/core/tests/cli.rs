use std::path::Path;
use std::process::Command;

use corset::data::Dataset;
use corset::learner::{fit, LearnerConfig, RuleSetModel};

fn corset(args: &[&str], dir: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_corset"))
        .args(args)
        .current_dir(dir)
        .output()
        .unwrap()
}

fn ok(args: &[&str], dir: &Path) -> String {
    let out = corset(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn train_save_load_predict_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(&["generate", "--out", "d.txt", "--n-records", "300", "--n-features", "30", "--n-labels", "30", "--seed", "3"], p);
    ok(&["split", "--data", "d.txt", "--fractions", "0.6,0.2,0.2", "--out-prefix", "s", "--seed", "3"], p);
    let args = ["--pool-size", "100", "--max-rules", "6", "--seed", "5", "--threads", "1"];
    let mut train = vec!["train", "--data", "s.train.txt", "--model", "m.json"];
    train.extend(args);
    ok(&train, p);

    let data = Dataset::load_sparse(p.join("s.train.txt")).unwrap();
    let test = Dataset::load_sparse(p.join("s.test.txt")).unwrap();
    let config = LearnerConfig { pool_size: 100, max_rules: 6, seed: 5, threads: 1, ..LearnerConfig::default() };
    let in_memory = fit(&data, &config).unwrap();
    let loaded = RuleSetModel::load(p.join("m.json")).unwrap();
    assert_eq!(loaded, in_memory);

    let printed = ok(&["predict", "--model", "m.json", "--data", "s.test.txt"], p);
    let expected: String = in_memory
        .predict_dataset(&test)
        .iter()
        .map(|l| l.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(" ") + "\n")
        .collect();
    assert_eq!(printed, expected);
}

#[test]
fn noiseless_training_stays_within_planted_count_and_evaluates() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(&["generate", "--out", "d.txt", "--n-records", "500", "--n-features", "30", "--n-labels", "30", "--noise", "0", "--seed", "1"], p);
    ok(&["train", "--data", "d.txt", "--model", "m.json", "--tau", "0.008", "--pool-size", "200", "--seed", "1"], p);
    let model = RuleSetModel::load(p.join("m.json")).unwrap();
    assert!(model.rules.len() <= 10, "{} rules", model.rules.len());
    let table = ok(&["evaluate", "--model", "m.json", "--data", "d.txt", "--json", "e.json"], p);
    assert!(table.contains("micro_f1"));
    let report: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("e.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 1);
    assert!(report["micro_f1"].as_f64().unwrap() > 0.9);
}

#[test]
fn perfect_model_scores_one() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(&["generate", "--out", "d.txt", "--n-records", "200", "--n-features", "12", "--n-labels", "12", "--noise", "0", "--seed", "2"], p);
    let truth: corset::synth::PlantedGroundTruth =
        serde_json::from_str(&std::fs::read_to_string(p.join("d.txt.truth.json")).unwrap()).unwrap();
    let d = Dataset::load_sparse(p.join("d.txt")).unwrap();
    let mut model = fit(&d, &LearnerConfig { max_rules: 1, pool_size: 10, ..LearnerConfig::default() }).unwrap();
    model.rules = truth.specs();
    model.save(p.join("m.json")).unwrap();
    let table = ok(&["evaluate", "--model", "m.json", "--data", "d.txt"], p);
    assert!(table.lines().any(|l| l.starts_with("micro_f1") && l.trim_end().ends_with("1.0000")), "{table}");
}

#[test]
fn sweep_and_samplers_emit_tab_separated_rows() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    ok(&["generate", "--out", "d.txt", "--n-records", "200", "--n-features", "20", "--n-labels", "20", "--seed", "4"], p);
    let sweep = ok(
        &["sweep-lambda", "--data", "d.txt", "--lambdas", "0.1,10", "--max-rules", "4", "--pool-size", "50", "--seed", "9", "--json", "s.json"],
        p,
    );
    assert_eq!(sweep.lines().count(), 3);
    assert!(sweep.lines().skip(1).all(|l| l.split('\t').count() == 5));
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p.join("s.json")).unwrap()).unwrap();
    assert_eq!(json["seed"], 9);

    let tails = ok(&["sample-tails", "--data", "d.txt", "--n", "5"], p);
    assert_eq!(tails.lines().count(), 5);
    assert!(tails.lines().all(|l| l.split('\t').nth(1).unwrap().parse::<usize>().unwrap() > 0));
    let heads = ok(&["sample-heads", "--data", "d.txt", "--tail", "0", "--n", "4", "--variant", "gh"], p);
    assert!(heads.lines().all(|l| l.split('\t').count() == 4));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path();
    assert_eq!(corset(&["stats", "--data", "missing.txt"], p).status.code(), Some(1));
    assert_eq!(corset(&["train", "--data", "x", "--model", "m", "--tau", "0.1", "--max-rules", "3"], p).status.code(), Some(2));
    assert_eq!(corset(&["split", "--data", "x", "--fractions", "0.5,0.5", "--out-prefix", "q"], p).status.code(), Some(2));
    assert_eq!(corset(&["no-such-command"], p).status.code(), Some(2));
}
