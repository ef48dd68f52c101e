use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn opcone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_opcone")).args(args).output().expect("binary runs")
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn roots_suite_passes_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("roots.json");
    let o = opcone(&["run", "--suite", "roots", "--dim", "6", "--trials", "200", "--seed", "0", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = read_json(&out);
    assert_eq!(v["suite"], "roots");
    assert_eq!(v["config"]["dim"], 6);
    assert_eq!(v["config"]["trials"], 200);
    assert!(v["failures"].as_array().unwrap().is_empty());
    let cases = v["cases"].as_array().unwrap();
    assert!(cases.len() >= 600);
    assert!(cases.iter().all(|c| c["status"] == "pass"));
    assert!(v["wall_ms"].is_u64());
}

#[test]
fn sharp_neumann_reports_margins() {
    let o = opcone(&["run", "--suite", "sharp-neumann", "--trials", "500"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["cases"].as_array().unwrap().len(), 500);
}

#[test]
fn unknown_suite_and_bad_usage_exit_2() {
    let o = opcone(&["run", "--suite", "no-such-suite"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown suite"));
    assert_eq!(opcone(&["run"]).status.code(), Some(2));
    assert_eq!(opcone(&["run", "--suite", "roots", "--dim", "0"]).status.code(), Some(2));
    assert_eq!(opcone(&["run", "--suite", "roots", "--tol", "-1"]).status.code(), Some(2));
    assert_eq!(opcone(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(opcone(&["example", "rdr", "--size", "1"]).status.code(), Some(2));
}

#[test]
fn unwritable_report_path_exits_2() {
    let o = opcone(&["run", "--suite", "rdr-commutant", "--out", "/nonexistent-dir/report.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn assertion_failure_exits_1_with_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = opcone(&["run", "--suite", "support-routes", "--trials", "5", "--tol", "1e-300", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let v = read_json(&out);
    let failures = v["failures"].as_array().unwrap();
    assert!(!failures.is_empty());
    assert!(failures[0]["seed"].is_u64());
    assert!(failures[0]["matrix"].is_object());
}

#[test]
fn reruns_are_identical_up_to_timing() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let p = dir.path().join(name);
        let o = opcone(&["run", "--suite", "cone", "--trials", "30", "--seed", "11", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
        let mut v = read_json(&p);
        v.as_object_mut().unwrap().remove("wall_ms");
        v
    };
    assert_eq!(run("a.json"), run("b.json"));
}

#[test]
fn examples_emit_json() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("v.json");
    let o = opcone(&["example", "volterra", "--size", "3", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = read_json(&p);
    assert_eq!(v["dim"], 3);

    let o = opcone(&["example", "rdr", "--size", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(v["min_commutator"].as_f64().unwrap() > 0.0);
    assert_eq!(v["algebra"]["basis"].as_array().unwrap().len(), 3);

    let o = opcone(&["example", "two-dim"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ambient_dim"], 2);
    assert_eq!(v["unital"], true);
}

#[test]
fn list_names_every_suite() {
    let o = opcone(&["list"]);
    let text = String::from_utf8(o.stdout).unwrap();
    for name in ["roots", "sharp-neumann", "ws-battery", "ocp", "quotient-cone", "domar"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}
