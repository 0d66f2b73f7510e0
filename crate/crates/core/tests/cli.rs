mod common;

use std::process::Command;

use common::*;
use serde_json::Value;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("dbnet").chain(args.iter().copied());
    let code = dbnet::cli::run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn report(args: &[&str]) -> (i32, Value) {
    let (code, out, err) = run(args);
    let text = if out.trim_start().starts_with('{') { out } else { err };
    (code, serde_json::from_str(&text).unwrap())
}

fn path(name: &str) -> String {
    data_path(name)
}

#[test]
fn validate_exit_codes() {
    for name in ["example4.json", "remark5.json", "cut_class.json", "stable_class.json", "db_tree.json", "extended_db.json"] {
        let (code, r) = report(&["validate", &path(name)]);
        assert_eq!(code, 0, "{name}: {r}");
        assert_eq!(r["schema_version"], 1);
        assert_eq!(r["input_digest"].as_str().unwrap().len(), 64);
    }
    let (code, r) = report(&["validate", &path("absorbing.json")]);
    assert_eq!(code, 3);
    assert_eq!(r["verdicts"]["ergodic"], false);
    let (code, r) = report(&["validate", &path("negative_rate.json")]);
    assert_eq!(code, 2);
    assert_eq!(r["error"]["exit_code"], 2);
    assert_eq!(run(&["validate", "/nonexistent/net.json"]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn analyze_example4() {
    let (code, r) = report(&["--exact", "analyze", &path("example4.json")]);
    assert_eq!(code, 0);
    let v = &r["verdicts"];
    assert_eq!(v["db"], false);
    assert_eq!(v["pdb"], true);
    assert_eq!(v["ratio_constant"], true);
    assert_eq!(v["cut_vertices"], false);
    let text = r["payload"].to_string();
    for frac in ["1/4", "3/10", "1/5"] {
        assert!(text.contains(frac), "{frac}");
    }
}

#[test]
fn analyze_remark5_and_class_files() {
    let (_, r) = report(&["analyze", &path("remark5.json")]);
    assert_eq!(r["verdicts"]["pdb"], true);
    assert_eq!(r["verdicts"]["cut_vertices"], true);
    let (_, r) = report(&["analyze", &path("cut_class.json")]);
    assert_eq!(r["verdicts"]["cut_class"], true);
    assert_eq!(r["verdicts"]["cut_class_shields_pair"], true);
    let (_, r) = report(&["analyze", &path("cycle3_circulating.json")]);
    assert_eq!(r["verdicts"]["pdb"], false);
    assert_eq!(r["verdicts"]["ratio_constant"], false);
}

#[test]
fn probe_verdicts() {
    let (code, r) = report(&["probe", &path("example4.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["verdicts"]["probe"], "UNSTABLE");
    let witness: Vec<&str> = r["payload"]["witness_path"].as_array().unwrap().iter().map(|v| v.as_str().unwrap()).collect();
    assert_eq!(witness, ["1", "3", "4", "2"]);
    let (_, r) = report(&["probe", &path("remark5.json")]);
    assert_eq!(r["verdicts"]["stability"], "UNSTABLE");
    let (_, r) = report(&["probe", &path("cut_class.json"), "--trials", "30", "--seed", "4"]);
    assert_eq!(r["verdicts"]["stability"], "STABLE");
    assert_eq!(r["verdicts"]["sampling_violations"], 0);
    let (_, r) = report(&["probe", &path("stable_class.json")]);
    assert_eq!(r["verdicts"]["probe"], "DB");
    assert_eq!(run(&["probe", &path("example4.json"), "--eps", "-1"]).0, 2);
    assert_eq!(run(&["probe", &path("example4.json"), "--pair", "1", "9"]).0, 2);
}

#[test]
fn simulate_is_deterministic() {
    let file = path("example4.json");
    let args = |w| ["simulate", &file, "--samples", "2000", "--seed", "3", "--workers", w].map(str::to_string);
    let (a, b) = (args("1"), args("8"));
    let (ca, oa, _) = run(&a.iter().map(String::as_str).collect::<Vec<_>>());
    let (cb, ob, _) = run(&b.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!((ca, cb), (0, 0));
    assert_eq!(oa, ob);
    assert!(oa.starts_with("t,estimate,half_width,samples"));
}

#[test]
fn simulate_regenerative() {
    let file = path("cycle3_circulating.json");
    let (code, out, err) = run(&["simulate", &file, "--t1", "0.2", "--t2", "1", "--cycles", "3000", "--seed", "1"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("t,r_ij,half_width_ij,r_ji,half_width_ji,cycles"));
    let r: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(r["verdicts"]["ratio_constant_at_1pct"], false);
    assert_eq!(run(&["simulate", &file, "--t1", "1"]).0, 2);
    assert_eq!(run(&["simulate", &file, "--t1", "2", "--t2", "1"]).0, 2);
}

#[test]
fn response_csv() {
    let (code, out, err) = run(&["response", &path("db_tree.json"), "--times", "0,0.5,1"]);
    assert_eq!(code, 0);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "t,r_ij,r_ji");
    assert_eq!(lines.len(), 4);
    let r: Value = serde_json::from_str(&err).unwrap();
    assert!(r["verdicts"]["ratio_law_deviation"].as_f64().unwrap() < 1e-12);
    let (code, _, err) = run(&["response", &path("extended_db.json"), "--open"]);
    assert_eq!(code, 0);
    let r: Value = serde_json::from_str(&err).unwrap();
    assert_eq!(r["verdicts"]["extended_db"], true);
    assert_eq!(run(&["response", &path("example4.json"), "--times", "-1"]).0, 2);
}

#[test]
fn dims() {
    let (code, r) = report(&["dims", "--L", "4"]);
    assert_eq!(code, 0);
    assert_eq!(r["verdicts"]["printed_det_nonzero"], true);
    assert_eq!(r["verdicts"]["dim_b_equals_dim_c"], false);
    let (_, r) = report(&["dims", "--L", "3"]);
    assert_eq!(r["verdicts"]["dim_b_equals_dim_c"], true);
    assert_eq!(run(&["dims", "--L", "2"]).0, 2);
}

#[test]
fn reports_are_reproducible() {
    let a = run(&["analyze", &path("remark5.json")]);
    let b = run(&["analyze", &path("remark5.json")]);
    assert_eq!(a, b);
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_dbnet");
    let status = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code().unwrap();
    assert_eq!(status(&["validate", &path("example4.json")]), 0);
    assert_eq!(status(&["validate", &path("negative_rate.json")]), 2);
    assert_eq!(status(&["validate", &path("absorbing.json")]), 3);
    assert_eq!(status(&["dims", "--L", "100"]), 0);
    let out = Command::new(bin).args(["probe", &path("example4.json")]).output().unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(r["command"], "probe");
}
