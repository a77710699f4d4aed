use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affode")).args(args).output().unwrap()
}

fn run_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_affode")).args(args).env(key, value).output().unwrap()
}

fn without_timing(text: &str) -> String {
    text.split_inclusive('\n').filter(|l| !l.trim_start().starts_with("\"timing_ms\"")).collect()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn goldens_match_modulo_timing() {
    for (f, file) in [("y'^3 + x", "analyze_cubic_plus_x.json"), ("0", "analyze_free_particle.json")] {
        let out = run(&["analyze", "--f", f, "--json"]);
        assert_eq!(out.status.code(), Some(0));
        assert_eq!(without_timing(&String::from_utf8(out.stdout).unwrap()), without_timing(&golden(file)), "{f}");
    }
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["analyze", "--f", "y*y'^3", "--json", "--formal-cross-check"][..],
        &["curvature", "--f", "-3*y'/(2*x)", "--json"][..],
        &["verify", "--suite", "all", "--json"][..],
    ] {
        let a = String::from_utf8(run(args).stdout).unwrap();
        let b = String::from_utf8(run(args).stdout).unwrap();
        assert_eq!(without_timing(&a), without_timing(&b), "{args:?}");
    }
}

#[test]
fn analyze_flat_corpus_member() {
    let v = json(&run(&["analyze", "--f", "-3*y'/(2*x)", "--json"]));
    assert_eq!(v["branch"], "flat");
    assert_eq!(v["linearizable"], true);
    assert_eq!(v["curvature_zero"], true);
    for k in ["I1", "I2", "I3"] {
        assert_eq!(v["invariants"][k], "0");
    }
}

#[test]
fn analyze_not_cubic_and_non_vanishing() {
    let v = json(&run(&["analyze", "--f", "y'^4", "--json"]));
    assert_eq!(v["linearizable"], "not-cubic");
    assert_eq!(v["closure_residuals"], Value::Null);
    let v = json(&run(&["analyze", "--f", "y", "--json"]));
    assert_eq!(v["branch"], "non-vanishing");
    assert_eq!(v["epsilon"], "1");
    assert_eq!(v["invariants"], Value::Null);
    assert_eq!(v["curvature_zero"], "n/a");
}

#[test]
fn formal_cross_check_is_reported() {
    let v = json(&run(&["analyze", "--f", "x^2", "--json", "--formal-cross-check"]));
    assert_eq!(v["formal_cross_check"]["relative_invariant"], true);
    assert_eq!(v["formal_cross_check"]["invariants"], true);
}

#[test]
fn curvature_of_flat_inputs_is_zero() {
    for f in ["0", "y'^3"] {
        let out = run(&["curvature", "--f", f, "--json"]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        let rows = v["entries"].as_array().unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().flat_map(|r| r.as_array().unwrap()).all(|e| e == "0"), "{f}");
    }
}

#[test]
fn curvature_rejects_non_flat_input() {
    let out = run(&["curvature", "--f", "y"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8(out.stderr).unwrap().contains('1'));
}

#[test]
fn verify_suites() {
    let out = run(&["verify", "--suite", "structure", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let status = |name: &str| {
        v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).map(|c| c["status"].clone())
    };
    assert_eq!(status("reduced-torsion-term"), Some("pass".into()));
    assert_eq!(status("normalization-mu-delta-nu"), None);
    let v = json(&run(&["verify", "--suite", "connection", "--json"]));
    let found = v["checks"].as_array().unwrap().iter().any(|c| c["name"] == "normalization-mu-delta-nu" && c["status"] == "pass");
    assert!(found);
    let v = json(&run(&["verify", "--suite", "all", "--json"]));
    let variant = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "pi2-variant-resolution").unwrap();
    assert!(variant["detail"].as_str().unwrap().contains("chosen theta3"));
    assert_eq!(v["failed"], 0);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["analyze", "--f", "x +* y"]).status.code(), Some(2));
    assert_eq!(run(&["analyze", "--f", "sin(x)"]).status.code(), Some(2));
    assert_eq!(run_env(&["analyze", "--f", "x^3"], "AFFODE_MAX_DEGREE", "2").status.code(), Some(5));
    assert_eq!(run_env(&["analyze", "--f", "x"], "AFFODE_MAX_DEGREE", "lots").status.code(), Some(2));
    assert_eq!(run(&["analyze", "--f", "x^3"]).status.code(), Some(0));
}
