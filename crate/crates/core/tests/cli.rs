use std::path::Path;
use std::process::{Command, Output};

use sentifs::bench::selftest;

fn sentifs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sentifs")).args(args).output().unwrap()
}

fn text(bytes: &[u8]) -> String {
    String::from_utf8_lossy(bytes).into_owned()
}

fn dataset(dir: &Path) -> String {
    let path = dir.join("sentences.tsv");
    selftest::write_synthetic_tsv(&path, 8, 120).unwrap();
    path.display().to_string()
}

#[test]
fn run_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path());
    let out = dir.path().join("out");
    let o = sentifs(&[
        "run",
        "--dataset",
        &data,
        "--fs",
        "CHI",
        "--k",
        "20,all",
        "--clf",
        "MNB",
        "--ensemble",
        "none",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    assert!(text(&o.stdout).contains("accuracy"));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["fs_method"], "CHI");
    assert_eq!(report["classifier"], "MNB");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path());
    let out = dir.path().join("out");
    let cfg = dir.path().join("run.conf");
    std::fs::write(
        &cfg,
        format!("# single run\ndataset = {data}\nfs = OR\nclf = BNB\nensemble = rs\nestimators = 3\nk = 10\n"),
    )
    .unwrap();
    let o = sentifs(&[
        "run",
        "--config",
        cfg.to_str().unwrap(),
        "--fs",
        "CD",
        "--set",
        "subspace_frac=0.25",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["fs_method"], "CD");
    assert_eq!(report["classifier"], "BNB");
    assert_eq!(report["ensemble"], "random_subspace");
    let echo: Vec<String> = serde_json::from_value(report["report"]["config"].clone()).unwrap();
    assert!(echo.contains(&"estimators=3".to_string()));
    assert!(echo.contains(&"subspace_frac=0.25".to_string()));
}

#[test]
fn unknown_dataset_fails_with_names() {
    let o = sentifs(&[
        "run",
        "--dataset",
        "nope",
        "--fs",
        "CHI",
        "--clf",
        "MNB",
        "--ensemble",
        "none",
    ]);
    assert!(!o.status.success());
    let err = text(&o.stderr);
    assert!(err.contains("preprocess") && err.contains("KITCHEN"), "{err}");
}

#[test]
fn bad_config_key_fails() {
    let o = sentifs(&["grid", "--set", "colour=blue"]);
    assert!(!o.status.success());
    assert!(text(&o.stderr).contains("colour"));
}

#[test]
fn prep_and_score_write_files() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path());
    let out = dir.path().join("prep");
    let o = sentifs(&["prep", "--dataset", &data, "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let train = std::fs::read_to_string(out.join("train.tokens.tsv")).unwrap();
    assert_eq!(train.lines().count(), 84);
    assert!(
        std::fs::read_to_string(out.join("vocabulary.tsv"))
            .unwrap()
            .lines()
            .count()
            > 10
    );

    let out = dir.path().join("score");
    let o = sentifs(&[
        "score",
        "--dataset",
        &data,
        "--fs",
        "CHI,MRDC",
        "--k",
        "15",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let chi = std::fs::read_to_string(out.join("ranking_CHI.tsv")).unwrap();
    assert!(chi.starts_with("# method=CHI"));
    assert_eq!(chi.lines().count(), 16);
    assert!(out.join("ranking_MRDC.tsv").is_file());
}

#[test]
fn grid_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let data = dataset(dir.path());
    let out = dir.path().join("grid");
    let o = sentifs(&[
        "grid",
        "--dataset",
        &data,
        "--fs",
        "CHI,NONE",
        "--clf",
        "MNB,DT",
        "--ensemble",
        "none,bagging",
        "--estimators",
        "3",
        "--jobs",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", text(&o.stderr));
    let csv = std::fs::read_to_string(out.join("grid.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
    let tables = std::fs::read_to_string(out.join("tables.md")).unwrap();
    assert!(tables.contains("## Accuracy of FS techniques, Base Classifiers"));
    assert!(tables.contains("## F1 of FS techniques, Bagging"));
    assert!(out.join("timing.md").is_file() && out.join("grid.json").is_file());
}

#[test]
fn selftest_passes() {
    let o = sentifs(&["selftest", "--seed", "3"]);
    assert!(o.status.success(), "{}", text(&o.stdout));
    let stdout = text(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 8, "{stdout}");
}
