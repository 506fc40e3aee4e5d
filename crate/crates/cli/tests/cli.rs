use std::process::{Command, Output};

use serde_json::Value;

fn qfsum(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfsum"))
        .args(args)
        .env_remove("QFSUM_THREADS")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON document")
}

fn csv_body(text: &str) -> Vec<&str> {
    let mut lines = text.lines();
    assert!(lines.next().unwrap().starts_with("# config: {"));
    lines.collect()
}

#[test]
fn sum_anchor_with_both_engines() {
    let out = qfsum(&["sum", "--form", "2", "--x", "2", "--engine", "both"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["S"], 15);
    assert_eq!((v["R"].as_u64(), v["Q"].as_u64(), v["T"].as_u64()), (Some(10), Some(1), Some(4)));
    assert_eq!(v["agree"], true);
    assert_eq!(v["config"]["command"]["sum"]["x"], 2);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(qfsum(&["sum", "--form", "5", "--x", "2"]).status.code(), Some(2));
    assert_eq!(qfsum(&["sum", "--x", "2"]).status.code(), Some(2));
    assert_eq!(qfsum(&["sum", "--form", "2", "--x", "2", "--nope"]).status.code(), Some(2));
    assert_eq!(qfsum(&["experiment", "--form", "2", "--grid", "8:4"]).status.code(), Some(2));
    assert_eq!(qfsum(&["sum", "--form", "2", "--x", "5000", "--engine", "brute"]).status.code(), Some(2));
}

#[test]
fn bijection_suite_for_seven() {
    let out = qfsum(&["verify", "--suite", "bijection", "--form", "7", "--dmax", "512"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let body = csv_body(&text);
    assert_eq!(body[0], "suite,N,name,passed,detail");
    assert!(body[1..].iter().all(|l| l.contains(",true,")));
}

#[test]
fn failed_check_exits_1_and_still_writes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("approx.json");
    let out = qfsum(&["verify", "--suite", "approx", "--form", "163", "--format", "json", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["passed"], false);
}

#[test]
fn unwritable_output_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("missing").join("out.csv");
    let out = qfsum(&["rho", "--form", "2", "--limit", "10", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("approx.csv");
    let p = path.to_str().unwrap();
    let args = ["approx", "--form", "67", "--dmax", "3000", "--threads", "1", "--out", p];
    assert_eq!(qfsum(&args).status.code(), Some(0));
    let first = std::fs::read(&path).unwrap();
    assert_eq!(qfsum(&args).status.code(), Some(0));
    assert_eq!(first, std::fs::read(&path).unwrap());

    let args4 = ["approx", "--form", "67", "--dmax", "3000", "--threads", "4", "--out", p];
    assert_eq!(qfsum(&args4).status.code(), Some(0));
    let four = std::fs::read_to_string(&path).unwrap();
    let first = String::from_utf8(first).unwrap();
    assert_eq!(csv_body(&first), csv_body(&four));
}

#[test]
fn rho_csv_columns() {
    let out = qfsum(&["rho", "--form", "2", "--limit", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let body = csv_body(&text);
    assert_eq!(body[0], "d,rho0,rho,E_N");
    assert_eq!(body.len(), 4);
    assert!(body[3].starts_with("3,2,5,"));
}

#[test]
fn experiment_rows_and_constants_record() {
    let out = qfsum(&["experiment", "--form", "2", "--grid", "64:256:2", "--engine", "both", "--cutoff", "20000"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let body = csv_body(&text);
    assert_eq!(body[0], "x,S,mainTerm,residual,residualOverX32,residualOverX2");
    assert_eq!(body.len(), 4);

    let out = qfsum(&["constants", "--form", "2", "--cutoff", "20000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert!(v["c2"]["halfwidth"].as_f64().unwrap() > 0.0);
    assert!((v["a"].as_f64().unwrap() - 0.5215953262).abs() < 1e-8);
}

#[test]
fn single_modulus_sieve_and_unknown_rule() {
    let out = qfsum(&["sieve-bound", "--form", "2", "--dmin", "64", "--dmax", "64", "--h", "2", "--m-rule", "D2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(csv_body(&String::from_utf8(out.stdout).unwrap()).len(), 2);
    assert_eq!(qfsum(&["sieve-bound", "--form", "2", "--m-rule", "cube"]).status.code(), Some(2));
}
