use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn hmk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hmk")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn example(dir: &Path, name: &str, params: &[&str]) -> PathBuf {
    let path = dir.join(format!("{name}{}.json", params.join("_")));
    let mut args = vec!["example", "--name", name, "--output", path.to_str().unwrap()];
    args.extend_from_slice(params);
    assert!(hmk(&args).status.success());
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn eval_fig3() {
    let dir = TempDir::new().unwrap();
    let m = example(dir.path(), "fig3_M", &[]);
    let v = json(&hmk(&["eval", "--model", s(&m), "--formula", "[]1 p"]));
    assert_eq!(v, serde_json::json!({ "truth_set": ["x", "y", "z"] }));
    let v = json(&hmk(&["eval", "--model", s(&m), "--formula", "p -< q"]));
    assert_eq!(v["truth_set"], serde_json::json!(["y", "z"]));
}

#[test]
fn bisim_fig3_excludes_x() {
    let dir = TempDir::new().unwrap();
    let m = example(dir.path(), "fig3_M", &[]);
    let p = example(dir.path(), "fig3_Mplus", &[]);
    let v = json(&hmk(&["bisim", "--left", s(&m), "--right", s(&p), "--fragment", "int", "--boxes", "1"]));
    assert_eq!(v["fixpoint"], serde_json::json!([["y", "y"], ["z", "z"]]));
    assert_eq!(v["conditions"], "{B1, B2, B3, []1-zig, []1-zag}");
}

#[test]
fn example_round_trips_through_validate() {
    let dir = TempDir::new().unwrap();
    let m = example(dir.path(), "fig3_M", &[]);
    let v = json(&hmk(&["validate", "--model", s(&m)]));
    assert_eq!(v["violations"], serde_json::json!([]));
    assert_eq!(v["strictly_condensed"], false);
    let out = json(&hmk(&["example", "--name", "fig3_M"]));
    assert_eq!(out["states"], serde_json::json!(["x", "y", "z"]));
    assert_eq!(out["boxes"], serde_json::json!([[["x", "y"]]]));
}

#[test]
fn strictify_then_validate() {
    let dir = TempDir::new().unwrap();
    let m = example(dir.path(), "fig3_M", &[]);
    let plus = dir.path().join("plus.json");
    assert!(hmk(&["strictify", "--model", s(&m), "--output", s(&plus)]).status.success());
    let v = json(&hmk(&["validate", "--model", s(&plus)]));
    assert_eq!(v["strictly_condensed"], true);
    let expected = json(&hmk(&["example", "--name", "fig3_Mplus"]));
    let got: Value = serde_json::from_str(&std::fs::read_to_string(&plus).unwrap()).unwrap();
    assert_eq!(got, expected);
}

#[test]
fn hm_check_verdicts_and_exit_codes() {
    let dir = TempDir::new().unwrap();
    let m = example(dir.path(), "fig3_M", &[]);
    let p = example(dir.path(), "fig3_Mplus", &[]);
    let out = hmk(&["hm-check", "--left", s(&p), "--right", s(&p), "--fragment", "int"]);
    assert_eq!(json(&out)["verdict"], "PASS");
    let out = hmk(&["hm-check", "--left", s(&m), "--right", s(&p), "--fragment", "int"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not strictly condensed"));
    let out = hmk(&["hm-check", "--seed", "11", "--depth", "3", "--fragment", "biint", "--diamonds", "1"]);
    let v = json(&out);
    assert_eq!(v["verdict"], "PASS");
    assert_eq!(v["sampled"]["disagreements"], serde_json::json!([]));
}

#[test]
fn equiv_spines_witness() {
    let dir = TempDir::new().unwrap();
    let a = example(dir.path(), "spines", &["1"]);
    let b = example(dir.path(), "spines", &["2"]);
    let v = json(&hmk(&["equiv", "--left", s(&a), "--right", s(&b), "--fragment", "int"]));
    assert_eq!(v["verified"], true);
    let roots = v["witnesses"].as_array().unwrap().iter().find(|w| w["pair"] == serde_json::json!(["r", "r"]));
    assert!(roots.is_some());
}

#[test]
fn oracle_budget_and_saturation() {
    let dir = TempDir::new().unwrap();
    let m = example(dir.path(), "fig3_M", &[]);
    let p = example(dir.path(), "fig3_Mplus", &[]);
    let v = json(&hmk(&["oracle", "--left", s(&m), "--right", s(&p), "--fragment", "int"]));
    assert_eq!(v["saturated"], true);
    assert_eq!(v["relation"], serde_json::json!([["x", "x"], ["y", "y"], ["z", "z"]]));
    let v = json(&hmk(&["oracle", "--left", s(&m), "--right", s(&p), "--fragment", "int", "--budget", "1"]));
    assert_eq!(v["saturated"], false);
}

#[test]
fn translate_and_dualize() {
    let v = json(&hmk(&["translate", "--formula", "p -> q"]));
    assert_eq!(v["translation"], "q -< p");
    let dir = TempDir::new().unwrap();
    let m = example(dir.path(), "fig3_M", &[]);
    let d = json(&hmk(&["dualize", "--model", s(&m)]));
    assert_eq!(d["valuation"]["p"], serde_json::json!(["x"]));
    assert_eq!(d["valuation"]["q"], serde_json::json!(["x", "y"]));
}

#[test]
fn quotient_collapses_spines() {
    let dir = TempDir::new().unwrap();
    let m = example(dir.path(), "spines", &["2"]);
    let q = json(&hmk(&["quotient", "--model", s(&m), "--fragment", "int"]));
    // Dead ends collapse, as do the two states with one step left.
    assert_eq!(q["states"].as_array().unwrap().len(), 3);
}

#[test]
fn closure_and_descriptive_check() {
    let dir = TempDir::new().unwrap();
    let m = example(dir.path(), "fig3_M", &[]);
    let v = json(&hmk(&["closure", "--model", s(&m), "--fragment", "int", "--boxes", "1"]));
    let sets = v["sets"].as_array().unwrap();
    assert!(sets.contains(&serde_json::json!(["z"])));
    assert!(sets.contains(&serde_json::json!(["y", "z"])));
    assert_eq!(v["general_model"], true);
    let v = json(&hmk(&["descriptive-check", "--model", s(&m)]));
    assert_eq!(v["holds"], false);
    assert_eq!(v["counterexample"], serde_json::json!(["x", "z"]));
    let alg = dir.path().join("alg.json");
    std::fs::write(&alg, r#"[[], ["y", "z"], ["x", "y", "z"]]"#).unwrap();
    let v = json(&hmk(&["descriptive-check", "--model", s(&m), "--algebra", s(&alg)]));
    assert!(v["holds"].is_boolean());
}

#[test]
fn errors_and_usage() {
    let dir = TempDir::new().unwrap();
    let out = hmk(&["eval", "--formula", "p"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hmk(&["launch"]);
    assert_eq!(out.status.code(), Some(2));
    let out = hmk(&["eval", "--model", "/nonexistent.json", "--formula", "p"]);
    assert_eq!(out.status.code(), Some(1));
    let m = example(dir.path(), "fig3_M", &[]);
    let out = hmk(&["eval", "--model", s(&m), "--formula", "p -> q -< r"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hmk(&["eval", "--model", s(&m), "--formula", "<>1 p"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hmk(&["equiv", "--left", s(&m), "--right", s(&m), "--fragment", "int", "--diamonds", "1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = hmk(&["example", "--name", "nope"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = example(dir.path(), "porcupine_W", &["2"]);
    let b = example(dir.path(), "porcupine_Wprime", &["2"]);
    let args = ["equiv", "--left", s(&a), "--right", s(&b), "--fragment", "biint"];
    assert_eq!(hmk(&args).stdout, hmk(&args).stdout);
}
