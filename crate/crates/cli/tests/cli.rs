use std::path::Path;
use std::process::{Command, Output};

fn polarcvx(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarcvx")).args(args).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn product_passes_on_exponential() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(dir.path(), "exp.json", r#"{"dim": 2, "family": "gauge", "body": {"name": "ball"}}"#);
    let out = polarcvx(&["product", &spec]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ratio = doc["results"][0]["report"]["ratio_to_exponential"].as_f64().unwrap();
    assert!((ratio - 1.0).abs() < 0.02, "{ratio}");
}

#[test]
fn polar_transform_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "f.json",
        r#"{"dim": 2, "family": "power_gauge", "body": {"name": "cube"}, "params": {"p": 2, "scale": 0.5}}"#,
    );
    let once = dir.path().join("once.json");
    let twice = dir.path().join("twice.json");
    assert_eq!(polarcvx(&["transform", &spec, "--out", once.to_str().unwrap()]).status.code(), Some(0));
    assert_eq!(
        polarcvx(&["transform", once.to_str().unwrap(), "--out", twice.to_str().unwrap()]).status.code(),
        Some(0)
    );
    let a: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&spec).unwrap()).unwrap();
    let b: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&twice).unwrap()).unwrap();
    assert_eq!(a["family"], b["family"]);
    assert_eq!(b["params"]["p"].as_f64(), Some(2.0));
    assert!((b["params"]["scale"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"dim\": 2,\n \"family\": }");
    let out = polarcvx(&["product", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":2:"));

    let unknown = write(dir.path(), "u.json", r#"{"dim": 2, "family": "gauge", "body": {"name": "blob"}}"#);
    assert_eq!(polarcvx(&["verify", &unknown]).status.code(), Some(2));

    let ok = write(dir.path(), "ok.json", r#"{"dim": 2, "family": "indicator", "body": {"name": "cube"}}"#);
    assert_eq!(polarcvx(&["verify", &ok, "--s-grid", "0,1"]).status.code(), Some(2));
    assert_eq!(polarcvx(&["verify", &ok, "--s-grid", "0.5,1", "--t-grid", "1"]).status.code(), Some(0));

    // the gauge of a strip vanishes on a line
    let ray = write(
        dir.path(),
        "strip.json",
        r#"{"dim": 2, "family": "gauge", "body": {"halfspaces": [[1, 0, 1], [-1, 0, 1]]}}"#,
    );
    assert_eq!(polarcvx(&["product", &ray]).status.code(), Some(4));
}

#[test]
fn constants_table() {
    let out = polarcvx(&["constants"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc["a"].as_f64().unwrap() >= 0.7);
    assert_eq!(doc["upper_bound_factor"].as_array().unwrap().len(), 10);
    assert_eq!(doc["ball_argument_bound"].as_array().unwrap().len(), 5);
}
