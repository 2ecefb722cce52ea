//! End-to-end exercises of the command-line surface.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn mscgr(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mscgr"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("failed to launch mscgr")
}

fn assert_success(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn feature_columns(path: &Path) -> usize {
    let content = fs::read_to_string(path).unwrap();
    let header = content
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("missing header");
    header.split(',').count() - 2
}

#[test]
fn gen_writes_split_and_is_byte_identical_on_rerun() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = mscgr(&["gen", "--seed", "42", "--per-class", "10", "--out", name], dir.path());
        assert_success(&out);
    }
    for file in ["train.fasta", "test.fasta", "manifest.json"] {
        let a = fs::read(dir.path().join("a").join(file)).unwrap();
        let b = fs::read(dir.path().join("b").join(file)).unwrap();
        assert_eq!(a, b, "{file} differs between identical runs");
    }
    let train = fs::read_to_string(dir.path().join("a/train.fasta")).unwrap();
    let test = fs::read_to_string(dir.path().join("a/test.fasta")).unwrap();
    assert_eq!(train.lines().filter(|l| l.starts_with('>')).count(), 56);
    assert_eq!(test.lines().filter(|l| l.starts_with('>')).count(), 14);
}

#[test]
fn roundtrip_command_passes_on_generated_data() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&mscgr(&["gen", "--seed", "1", "--per-class", "5", "--out", "."], dir.path()));
    let out = mscgr(
        &["roundtrip", "--input", "train.fasta", "--scales", "1,2,3", "--out", "report.json"],
        dir.path(),
    );
    assert_success(&out);
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["all_passed"], true);
}

#[test]
fn roundtrip_protein_scale_four_needs_override() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&mscgr(&["gen", "--seed", "1", "--per-class", "2", "--out", "."], dir.path()));
    let out = mscgr(&["roundtrip", "--input", "train.fasta", "--scales", "4"], dir.path());
    assert!(!out.status.success());
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds the limit"));
    let with_override = mscgr(
        &["roundtrip", "--input", "train.fasta", "--scales", "4", "--override-large-alphabet"],
        dir.path(),
    );
    assert_success(&with_override);
}

#[test]
fn featurize_column_counts_per_set() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&mscgr(&["gen", "--seed", "3", "--per-class", "4", "--out", "."], dir.path()));
    assert_success(&mscgr(
        &["featurize", "--input", "train.fasta", "--set", "cgr", "--out", "cgr.csv", "--override-large-alphabet"],
        dir.path(),
    ));
    assert_eq!(feature_columns(&dir.path().join("cgr.csv")), 24);

    assert_success(&mscgr(
        &["rand-embed", "--input", "train.fasta", "--dim", "8", "--seed", "3", "--out", "emb.csv"],
        dir.path(),
    ));
    assert_success(&mscgr(
        &[
            "featurize", "--input", "train.fasta", "--set", "embed+cgr", "--embeddings", "emb.csv",
            "--out", "fused.csv", "--override-large-alphabet",
        ],
        dir.path(),
    ));
    assert_eq!(feature_columns(&dir.path().join("fused.csv")), 8 + 24);
}

#[test]
fn featurize_reuses_train_vocabulary_for_test() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&mscgr(&["gen", "--seed", "5", "--per-class", "6", "--out", "."], dir.path()));
    assert_success(&mscgr(
        &["featurize", "--input", "train.fasta", "--set", "kmer", "--out", "train.csv", "--vocab", "vocab.json"],
        dir.path(),
    ));
    assert_success(&mscgr(
        &["featurize", "--input", "test.fasta", "--set", "kmer", "--out", "test.csv", "--vocab", "vocab.json"],
        dir.path(),
    ));
    // same vocabulary, so identical widths even though the test corpus is
    // smaller
    assert_eq!(
        feature_columns(&dir.path().join("train.csv")),
        feature_columns(&dir.path().join("test.csv"))
    );
}

#[test]
fn train_and_eval_produce_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&mscgr(&["gen", "--seed", "7", "--per-class", "12", "--out", "."], dir.path()));
    for (fasta, csv) in [("train.fasta", "train.csv"), ("test.fasta", "test.csv")] {
        assert_success(&mscgr(
            &["featurize", "--input", fasta, "--set", "kmer", "--out", csv, "--vocab", "vocab.json"],
            dir.path(),
        ));
    }
    assert_success(&mscgr(
        &["train", "--features", "train.csv", "--lambda", "0.1", "--max-iter", "150", "--out", "model.json"],
        dir.path(),
    ));
    let out = mscgr(
        &["eval", "--features", "test.csv", "--model", "model.json", "--out", "metrics.json"],
        dir.path(),
    );
    assert_success(&out);
    assert!(String::from_utf8_lossy(&out.stdout).contains("accuracy"));
    let metrics: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("metrics.json")).unwrap()).unwrap();
    assert!(metrics["accuracy"].as_f64().unwrap() > 0.0);
    assert_eq!(metrics["confusion"].as_array().unwrap().len(), 7);
    let model: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("model.json")).unwrap()).unwrap();
    assert_eq!(model["format_version"], "mscgr-1");
    assert_eq!(model["classes"].as_array().unwrap().len(), 7);
}

#[test]
fn train_on_empty_features_is_degenerate() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.csv"), "id,label,f1\n").unwrap();
    let out = mscgr(&["train", "--features", "empty.csv"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn plotdata_single_symbol() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&mscgr(
        &["plotdata", "--sequence", "A", "--scales", "1", "--out", "pd.json"],
        dir.path(),
    ));
    let data: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("pd.json")).unwrap()).unwrap();
    let scale = &data["scales"][0];
    assert_eq!(scale["points"].as_array().unwrap().len(), 2);
    assert_eq!(scale["tokens"][0], "A");
    assert_eq!(data["feature_vector"], serde_json::Value::Null);
}

#[test]
fn plotdata_twelve_mer_point_counts() {
    let dir = tempfile::tempdir().unwrap();
    assert_success(&mscgr(
        &["plotdata", "--sequence", "ATCGATCGTAGC", "--out", "pd.json"],
        dir.path(),
    ));
    let data: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("pd.json")).unwrap()).unwrap();
    let sizes: Vec<usize> = data["scales"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["points"].as_array().unwrap().len())
        .collect();
    assert_eq!(sizes, vec![13, 12, 11, 10]);
    assert_eq!(data["feature_vector"].as_array().unwrap().len(), 24);
}

#[test]
fn config_file_values_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), "seed=7\nper_class=3\nout=from_cfg\n").unwrap();
    assert_success(&mscgr(&["gen", "--config", "run.cfg"], dir.path()));
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("from_cfg/manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["per_class"], 3);

    // the flag wins over the config entry
    assert_success(&mscgr(&["gen", "--config", "run.cfg", "--seed", "9", "--out", "flagged"], dir.path()));
    let manifest: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.path().join("flagged/manifest.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(manifest["seed"], 9);
}

#[test]
fn missing_input_file_is_an_io_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = mscgr(&["roundtrip", "--input", "nope.fasta"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}
