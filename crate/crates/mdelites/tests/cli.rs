//! End-to-end behaviour of the `mdelites` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn repo(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel)
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn mdelites(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdelites"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn run_square(out: &Path) -> Output {
    let instance = repo("data/instances/square4.json");
    mdelites(&[
        "run",
        "--instance",
        instance.to_str().unwrap(),
        "--seed",
        "1",
        "--evals",
        "2000",
        "--out",
        out.to_str().unwrap(),
    ])
}

#[test]
fn run_writes_the_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let o = run_square(dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for f in ["archive.csv", "history.log", "manifest.json"] {
        assert!(dir.path().join(f).is_file(), "{f} missing");
    }
    let text = stdout(&o);
    assert!(text.contains("occupied"), "{text}");
    assert!(text.contains("best"), "{text}");
    assert!(text.contains("wall time"), "{text}");
}

#[test]
fn run_usage_errors_exit_1() {
    let o = mdelites(&["run", "--seed", "1", "--evals", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--instance"), "{}", stderr(&o));
    assert!(stderr(&o).contains("Usage"), "{}", stderr(&o));

    let dir = tempfile::tempdir().unwrap();
    let instance = repo("data/instances/square4.json");
    let o = mdelites(&[
        "run",
        "--instance",
        instance.to_str().unwrap(),
        "--seed",
        "1",
        "--evals",
        "10",
        "--init",
        "100",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("budget below init population"), "{}", stderr(&o));
    assert!(!dir.path().join("history.log").exists());

    let o = mdelites(&["run", "--instance", "/no/such.json", "--seed", "1", "--evals", "10"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/no/such.json"));
}

#[test]
fn run_with_explicit_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let instance = repo("data/instances/square4.json");
    let o = mdelites(&[
        "run",
        "--instance",
        instance.to_str().unwrap(),
        "--seed",
        "3",
        "--evals",
        "500",
        "--bounds",
        "[[0,5],[0,2000],[0,20],[0,2]]",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["bounds"][1]["hi"], 2000.0);
    assert!(manifest["config"]["bounds_policy"]["fixed"].is_array());
}

#[test]
fn help_and_version_exit_0() {
    assert_eq!(mdelites(&["--help"]).status.code(), Some(0));
    assert_eq!(mdelites(&["--version"]).status.code(), Some(0));
    assert_eq!(mdelites(&[]).status.code(), Some(1));
    assert_eq!(mdelites(&["frobnicate"]).status.code(), Some(1));
}

#[test]
fn history_renders_table1() {
    let log = fixture("table1_history.log");
    let o = mdelites(&["history", "--log", log.to_str().unwrap(), "20:20:9:18"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 14);
    assert!(lines[0].contains("Time") && lines[0].contains("Origin") && lines[0].contains("Fitness"));
    assert!(lines[13].contains("874.23"));
    assert!(lines[1].contains("12:4:9:11/12:12:4:17"));
}

#[test]
fn history_edge_cases() {
    let log = fixture("table1_history.log");
    let log = log.to_str().unwrap();
    let o = mdelites(&["history", "--log", log, "1:1:1:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("bin never occupied"));

    let o = mdelites(&["history", "--log", log, "21:0:1:1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("21:0:1:1"), "{}", stderr(&o));

    let o = mdelites(&["history", "--log", log, "1-1-1-1"]);
    assert_eq!(o.status.code(), Some(1));

    let o = mdelites(&["history", "--log", "/no/such.log", "1:1:1:1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn history_reads_scale_from_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let instance = repo("data/instances/square4.json");
    let o = mdelites(&[
        "run",
        "--instance",
        instance.to_str().unwrap(),
        "--seed",
        "2",
        "--evals",
        "300",
        "--scale",
        "5",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let log = dir.path().join("history.log");
    let o = mdelites(&["history", "--log", log.to_str().unwrap(), "6:1:1:1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = mdelites(&["history", "--log", log.to_str().unwrap(), "5:1:1:1"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn match_writes_annotations() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_square(dir.path()).status.code(), Some(0));
    let archive = dir.path().join("archive.csv");
    let catalogue = repo("data/patterns/table3.tsv");
    let o = mdelites(&[
        "match",
        "--archive",
        archive.to_str().unwrap(),
        "--catalogue",
        catalogue.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("(3/3)"), "{}", stdout(&o));
    let ann = fs::read_to_string(dir.path().join("annotations.csv")).unwrap();
    let rows = fs::read_to_string(&archive).unwrap().lines().count();
    assert!(ann.starts_with("bin,confidence,matched_labels\n"));
    assert_eq!(ann.lines().count(), rows);

    let empty = dir.path().join("empty.tsv");
    fs::write(&empty, "# nothing yet\n").unwrap();
    let o = mdelites(&[
        "match",
        "--archive",
        archive.to_str().unwrap(),
        "--catalogue",
        empty.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("confidence 1.0"), "{}", stdout(&o));
    let ann = fs::read_to_string(dir.path().join("annotations.csv")).unwrap();
    assert!(ann.lines().skip(1).all(|l| l.split(',').nth(1) == Some("1")));

    let bad = dir.path().join("bad.tsv");
    fs::write(&bad, "unbalanced\tC2(\n").unwrap();
    let o = mdelites(&[
        "match",
        "--archive",
        archive.to_str().unwrap(),
        "--catalogue",
        bad.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unbalanced"), "{}", stderr(&o));
}

#[test]
fn export_ui_bundles_a_run() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_square(dir.path()).status.code(), Some(0));
    let out = dir.path().to_str().unwrap();
    let catalogue = repo("data/patterns/table3.tsv");
    let o = mdelites(&["export-ui", "--out", out, "--catalogue", catalogue.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let first = fs::read(dir.path().join("map.json")).unwrap();
    let bundle: serde_json::Value = serde_json::from_slice(&first).unwrap();
    assert_eq!(bundle["schema_version"], 1);
    assert_eq!(bundle["catalogue"].as_array().unwrap().len(), 3);
    assert!(bundle["manifest"].get("wall_time_seconds").is_none());

    // idempotent
    let o = mdelites(&["export-ui", "--out", out, "--catalogue", catalogue.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(fs::read(dir.path().join("map.json")).unwrap(), first);
}

#[test]
fn export_ui_rejects_a_corrupted_log() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_square(dir.path()).status.code(), Some(0));
    let log_path = dir.path().join("history.log");
    let log = fs::read_to_string(&log_path).unwrap();
    let mut lines: Vec<String> = log.lines().map(String::from).collect();
    assert!(lines.len() >= 3);
    let fields: Vec<&str> = lines[2].splitn(10, ',').collect();
    let mut broken: Vec<String> = fields.iter().map(|s| s.to_string()).collect();
    broken[4] = "not-a-number".into();
    lines[2] = broken.join(",");
    fs::write(&log_path, lines.join("\n") + "\n").unwrap();
    let o = mdelites(&["export-ui", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("history.log:3:"), "{}", stderr(&o));

    // a log cut short
    fs::write(&log_path, &log[..log.len() - 3]).unwrap();
    let o = mdelites(&["export-ui", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("truncated"), "{}", stderr(&o));

    // well-formed lines that break the archive rules
    let mut swapped: Vec<&str> = log.lines().collect();
    swapped.swap(0, 1);
    fs::write(&log_path, swapped.join("\n") + "\n").unwrap();
    let o = mdelites(&["export-ui", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("history.log:2:"), "{}", stderr(&o));
}

#[test]
fn export_ui_missing_inputs() {
    let dir = tempfile::tempdir().unwrap();
    let o = mdelites(&["export-ui", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("manifest.json"), "{}", stderr(&o));
}

#[test]
fn export_ui_empty_archive() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_square(dir.path()).status.code(), Some(0));
    fs::write(dir.path().join("history.log"), "").unwrap();
    let csv = fs::read_to_string(dir.path().join("archive.csv")).unwrap();
    fs::write(
        dir.path().join("archive.csv"),
        csv.lines().next().unwrap().to_string() + "\n",
    )
    .unwrap();
    let o = mdelites(&["export-ui", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let bundle: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("map.json")).unwrap()).unwrap();
    assert_eq!(bundle["cells"], serde_json::json!([]));
    assert_eq!(bundle["timelines"], serde_json::json!({}));
}

#[test]
fn archive_and_log_must_agree() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_square(dir.path()).status.code(), Some(0));
    let csv_path = dir.path().join("archive.csv");
    let csv = fs::read_to_string(&csv_path).unwrap();
    let kept: Vec<&str> = csv.lines().take(csv.lines().count() - 1).collect();
    fs::write(&csv_path, kept.join("\n") + "\n").unwrap();
    let o = mdelites(&["export-ui", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("archive.csv"), "{}", stderr(&o));
}
