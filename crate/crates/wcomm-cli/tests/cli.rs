//! End-to-end tests of the `wcomm` binary: each test runs the real
//! executable and checks stdout, stderr, and the exit code.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_wcomm"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

/// Build `ring zn 8` into the given directory and return the file path.
fn build_z8(dir: &Path) -> PathBuf {
    let path = dir.join("z8.json");
    let out = run(&["build", "ring", "zn", "8", "-o", path.to_str().unwrap()]);
    assert!(out.status.success(), "build failed: {}", stderr_of(&out));
    path
}

#[test]
fn build_then_commutator_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let alg = build_z8(dir.path());
    let out = run(&[
        "commutator",
        alg.to_str().unwrap(),
        "--x",
        "2",
        "--y",
        "2",
        "--w",
        "zero",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("value: {0,4}"), "unexpected output: {text}");
    assert!(text.contains("status: exact"), "unexpected output: {text}");
    assert!(
        text.contains("method: term_enumeration"),
        "unexpected output: {text}"
    );
}

#[test]
fn out_of_range_generator_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let alg = build_z8(dir.path());
    let out = run(&["commutator", alg.to_str().unwrap(), "--x", "99", "--y", "2"]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr_of(&out));
    assert!(stderr_of(&out).contains("out of range"));
}

#[test]
fn missing_file_is_an_input_error() {
    let out = run(&["check", "/definitely/not/a/file.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_reports_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let alg = build_z8(dir.path());
    let args = [
        "--json",
        "--no-timestamp",
        "commutator",
        alg.to_str().unwrap(),
        "--x",
        "2",
        "--y",
        "2",
    ];
    let first = run(&args);
    let second = run(&args);
    assert!(first.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "reports must be byte-identical"
    );

    let report: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    assert_eq!(report["command"], "commutator");
    assert_eq!(
        report["report"]["result"]["value"],
        serde_json::json!([0, 4])
    );
    assert_eq!(report["report"]["result"]["status"], "exact");
    assert!(report.get("timestamp").is_none());
}

#[test]
fn json_timestamp_is_present_by_default() {
    let dir = tempfile::tempdir().unwrap();
    let alg = build_z8(dir.path());
    let out = run(&["--json", "check", alg.to_str().unwrap()]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["timestamp"].is_u64());
}

#[test]
fn verify_passes_on_the_builtin_ring() {
    let dir = tempfile::tempdir().unwrap();
    let alg = build_z8(dir.path());
    let out = run(&["verify", alg.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("result: ok"), "unexpected output: {text}");
    assert!(!text.contains("[fail]"), "unexpected failure line: {text}");
}

#[test]
fn cross_validation_routes_agree_on_the_builtin_ring() {
    let dir = tempfile::tempdir().unwrap();
    let alg = build_z8(dir.path());
    let out = run(&[
        "cross-validate",
        alg.to_str().unwrap(),
        "--x",
        "2",
        "--y",
        "2",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("routes agree"), "unexpected output: {text}");
    assert!(
        text.contains("ring_closed_form"),
        "unexpected output: {text}"
    );
}

#[test]
fn smith_without_maltsev_term_is_a_domain_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("meet2.json");
    std::fs::write(
        &path,
        r#"{
  "name": "meet2",
  "size": 2,
  "zero": 0,
  "operations": [
    {"name": "zero", "arity": 0, "table": 0},
    {"name": "meet", "arity": 2, "table": [[0, 0], [0, 1]]}
  ]
}"#,
    )
    .unwrap();
    let out = run(&[
        "smith",
        path.to_str().unwrap(),
        "--alpha-pairs",
        "0:1",
        "--beta-pairs",
        "0:1",
    ]);
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr_of(&out));
}

#[test]
fn build_rejects_unknown_specs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.json");
    let out = run(&["build", "group", "frobnicate", "-o", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr_of(&out).contains("group spec"));
}

#[test]
fn custom_group_table_roundtrips_with_a_name() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table.json");
    std::fs::write(&table, "[[0,1,2,3],[1,0,3,2],[2,3,0,1],[3,2,1,0]]").unwrap();
    let alg = dir.path().join("klein.json");
    let out = run(&[
        "build",
        "group",
        "table",
        table.to_str().unwrap(),
        "-o",
        alg.to_str().unwrap(),
        "--name",
        "klein4",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));

    let out = run(&["check", alg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    assert!(
        text.contains("algebra: klein4 (size 4"),
        "unexpected output: {text}"
    );
    assert!(
        text.contains("structure: abelian_group"),
        "unexpected output: {text}"
    );
}

#[test]
fn smith_accepts_normal_generators() {
    let dir = tempfile::tempdir().unwrap();
    let alg = build_z8(dir.path());
    let out = run(&[
        "smith",
        alg.to_str().unwrap(),
        "--alpha-normal",
        "2",
        "--beta-normal",
        "2",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(
        text.contains("zero class: {0,4}"),
        "unexpected output: {text}"
    );
}

#[test]
fn sequential_thread_flag_gives_the_same_value() {
    let dir = tempfile::tempdir().unwrap();
    let alg = build_z8(dir.path());
    let parallel = run(&[
        "--json",
        "--no-timestamp",
        "commutator",
        alg.to_str().unwrap(),
        "--x",
        "3",
        "--y",
        "3",
        "--w",
        "all",
    ]);
    let sequential = run(&[
        "--json",
        "--no-timestamp",
        "--threads",
        "1",
        "commutator",
        alg.to_str().unwrap(),
        "--x",
        "3",
        "--y",
        "3",
        "--w",
        "all",
    ]);
    assert!(parallel.status.success());
    assert!(sequential.status.success());
    assert_eq!(parallel.stdout, sequential.stdout);
}
