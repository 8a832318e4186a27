//! End-to-end tests against the built `hpcause` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hpcause"));
    // Keep log output from leaking into stderr assertions.
    cmd.env("RUST_LOG", "error");
    cmd.env_remove("HPCAUSE_TIMEOUT_SECS");
    cmd
}

fn models_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../models")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).current_dir(models_dir()).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf8 stderr")
}

#[test]
fn check_cause_exits_zero() {
    let out = run(&["check", "--query", "rock_throwing_suzy.hpq"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("AC1: holds"), "{text}");
    assert!(text.contains("AC2: holds (W = {BH=0, BT=1})"), "{text}");
    assert!(text.contains("AC3: holds"), "{text}");
    assert!(text.contains("verdict: ST=1 is an actual cause of BS"), "{text}");
}

#[test]
fn check_non_cause_exits_one_with_diagnosis() {
    let out = run(&["check", "--query", "rock_throwing_both.hpq"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.contains("AC3: fails"), "{text}");
    assert!(text.contains("BT=1 is padding (NMC2)"), "{text}");
    assert!(text.contains("verdict: ST=1, BT=1 is not an actual cause of BS"), "{text}");
}

#[test]
fn no_diagnose_suppresses_the_report() {
    let out = run(&["check", "--query", "rock_throwing_both.hpq", "--no-diagnose"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!stdout(&out).contains("NMC"));
}

#[test]
fn flags_override_query_file_fields() {
    // Same query file, but the cause shrinks to Suzy alone: a cause again.
    let out = run(&[
        "check",
        "--query",
        "rock_throwing_both.hpq",
        "--cause",
        "ST=1",
        "--strategy",
        "brute-force",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("strategy: BRUTE_FORCE"), "{text}");
    assert!(text.contains("minimal W = {BH=0}"), "{text}");
}

#[test]
fn check_without_query_file() {
    let out = run(&[
        "check",
        "--model",
        "rock_throwing.hpm",
        "--context",
        "ST_exo=1, BT_exo=1",
        "--cause",
        "BT=1",
        "--phi",
        "BS",
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("AC2: fails"));
}

#[test]
fn json_output_shape() {
    let out = run(&["check", "--query", "rock_throwing_both.hpq", "--format", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["model"], "RockThrowing");
    assert_eq!(v["strategy"], "SAT_COMBINED");
    assert_eq!(v["ac1"], true);
    assert_eq!(v["ac2"], true);
    assert_eq!(v["ac3"], false);
    assert_eq!(v["is_cause"], false);
    assert_eq!(v["w"], serde_json::json!([{"variable": "BH", "value": false}]));
    assert_eq!(v["diagnosis"][0]["variable"], "BT");
    assert_eq!(v["diagnosis"][0]["condition"], "NMC2");
    assert_eq!(v["diagnosis"][0]["witness_subset"][0]["variable"], "ST");
    assert_eq!(v["diagnosis_error"], serde_json::Value::Null);
    assert!(v["timings_ns"]["ac2"].is_u64());
}

#[test]
fn missing_file_exits_two() {
    let out = run(&["check", "--query", "no_such_file.hpq"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot read"));
}

#[test]
fn incomplete_context_exits_two() {
    let out = run(&[
        "check",
        "--model",
        "rock_throwing.hpm",
        "--context",
        "ST_exo=1",
        "--cause",
        "ST=1",
        "--phi",
        "BS",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("BT_exo"));
}

#[test]
fn model_paths_resolve_relative_to_the_query_file() {
    let dir = tempfile::tempdir().expect("tempdir");
    let nested = dir.path().join("nested");
    std::fs::create_dir(&nested).expect("mkdir");
    std::fs::copy(models_dir().join("rock_throwing.hpm"), nested.join("rt.hpm")).expect("copy");
    std::fs::write(
        nested.join("q.hpq"),
        "model = rt.hpm\ncontext = ST_exo=1, BT_exo=1\ncause = ST=1\nphi = BS\n",
    )
    .expect("write");

    // Run from an unrelated cwd; only the query path is absolute.
    let out = bin()
        .args(["check", "--query", nested.join("q.hpq").to_str().unwrap()])
        .current_dir(dir.path())
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
}

#[test]
fn generate_round_trips_through_the_parser() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("bt3.hpm");
    let out = run(&["generate", "binary-tree", "--height", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stderr(&out).contains("BT3: 7 endogenous, 4 exogenous"));

    let text = std::fs::read_to_string(&path).expect("file written");
    let model = hpcause::dsl::parse_model(&text).expect("parses back");
    assert_eq!(model.name(), "BT3");
    assert_eq!(hpcause::dsl::serialize_model(&model), text);
}

#[test]
fn generate_abt_to_stdout() {
    let out = run(&["generate", "abt", "--height", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("model ABT2\n"), "{text}");
    assert!(text.contains("late = arm & !t"), "{text}");
}

#[test]
fn bench_emits_the_full_grid_as_csv() {
    let out = run(&[
        "bench",
        "--scenario",
        "rock_throwing_suzy.hpq",
        "--scenario",
        "rock_throwing_both.hpq",
        "--strategies",
        "SAT,SAT_MINIMAL",
        "--warmup",
        "0",
        "--measure",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(
        lines[0],
        "scenario,strategy,ac1,ac2,ac3,w_size,mean_ns,stddev_ns,iters,timeout"
    );
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("rock_throwing_suzy,SAT,true,true,true,2,"));
    assert!(lines[2].starts_with("rock_throwing_suzy,SAT_MINIMAL,true,true,true,1,"));
    assert!(lines[3].starts_with("rock_throwing_both,SAT,true,true,false,0,"));
    assert!(lines[4].starts_with("rock_throwing_both,SAT_MINIMAL,true,true,false,0,"));
    for line in &lines[1..] {
        assert!(line.ends_with(",2,false"), "{line}");
    }
}

#[test]
fn bench_scenario_without_model_line_exits_two() {
    let dir = tempfile::tempdir().expect("tempdir");
    let path = dir.path().join("bad.hpq");
    std::fs::write(&path, "context = ST_exo=1\ncause = ST=1\nphi = BS\n").expect("write");
    let out = run(&["bench", "--scenario", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("scenario files need a `model` line"));
}
