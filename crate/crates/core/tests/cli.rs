use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shimura-vol"))
        .args(args)
        .output()
        .unwrap()
}

fn json(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{args:?}: {e}\n{}", String::from_utf8_lossy(&out.stdout)));
    (v, out.status.code().unwrap())
}

#[test]
fn field_report() {
    let (v, code) = json(&["field", "-D", "7"]);
    assert_eq!(code, 0);
    assert_eq!(v["schema"], "shimura-vol/1");
    assert_eq!(v["D"], 7);
    assert_eq!(v["h"], "1");
    assert_eq!(v["w"], 2);
    assert!(v["hFalt"].as_str().unwrap().parse::<f64>().is_ok());

    let (v, code) = json(&["field", "-D", "15", "--digits", "80"]);
    assert_eq!(code, 0);
    assert_eq!(v["digits"], 80);
    assert_eq!(v["h"], "2");
}

#[test]
fn input_errors_exit_two() {
    let (v, code) = json(&["field", "-D", "8"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "NotFundamental");

    let (v, code) = json(&["volume", "-D", "7", "-n", "3", "--inv", "7=1"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "InvalidInvariantProduct");

    let (v, code) = json(&["weight", "-D", "7", "-n", "3", "--inv", "7=-1", "--coeffs", "31:1"]);
    assert_eq!(code, 2);
    assert_eq!(v["error"], "BadPrime");

    assert_eq!(run(&["field", "-D", "7", "--digits", "10"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
}

#[test]
fn volume_anchors() {
    let (v, _) = json(&["volume", "-D", "7", "-n", "3", "--inv", "7=-1"]);
    assert_eq!(v["volC_hodge_MW"], "2/21");
    let (v, _) = json(&["volume", "-D", "7", "-n", "2", "--inv", "7=-1"]);
    assert_eq!(v["volC_hodge_MW"], "1/3");
    let (v, code) = json(&["volume", "-D", "15", "-n", "4", "--inv", "3=1,5=-1"]);
    assert_eq!(code, 0);
    assert_eq!(v["checks_pass"], true);
}

#[test]
fn coefficient_and_weight() {
    let (v, code) = json(&["coeff", "-D", "7", "-n", "3", "--inv", "7=-1", "-m", "29"]);
    assert_eq!(code, 0);
    assert_eq!(v["B"], "-5894");
    assert!(v["Bprime"].as_str().unwrap().parse::<f64>().is_ok());

    let (by_spec, _) = json(&["coeff", "--spec", "D=7;n=3;inv=7:-1", "-m", "29"]);
    assert_eq!(by_spec, v);

    let (v, code) = json(&["weight", "-D", "7", "-n", "3", "--inv", "7=-1", "--coeffs", "29:1"]);
    assert_eq!(code, 0);
    assert!(v.to_string().contains("5894"));
}

#[test]
fn density_with_oracle() {
    let (v, code) = json(&[
        "density", "-D", "7", "-n", "2", "--inv", "7=-1", "-p", "7", "-m", "1", "--oracle",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["enumeration-match"], true);
    assert_eq!(v["series-match"], true);
    assert_eq!(v["rendered"], "1 - 49*X");
}

#[test]
fn output_is_deterministic() {
    let args = ["table", "--ds", "7,15", "--n-max", "4", "--threads", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let one = run(&["table", "--ds", "7,15", "--n-max", "4", "--threads", "1"]);
    assert_eq!(a.stdout, one.stdout);
}

#[test]
fn csv_table() {
    let out = run(&["table", "--ds", "7", "--n-max", "3", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4, "{text}");
    let header: Vec<&str> = lines[0].split(',').collect();
    for row in &lines[1..] {
        assert_eq!(row.split(',').count(), header.len());
    }
}
