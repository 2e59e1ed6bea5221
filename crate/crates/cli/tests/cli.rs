use std::process::{Command, Output};

use fedquant::star::MomentumPolynomial;
use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fedquant"))
        .args(args)
        .current_dir(concat!(env!("CARGO_MANIFEST_DIR"), "/../.."))
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = vec!["--json"];
    a.extend_from_slice(args);
    let o = run(&a);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn mp(s: &str) -> MomentumPolynomial {
    MomentumPolynomial::parse(s).unwrap()
}

fn star_display(args: &[&str]) -> MomentumPolynomial {
    let mut a = vec!["star"];
    a.extend_from_slice(args);
    mp(json(&a)["display"].as_str().unwrap())
}

#[test]
fn flat_standard_products() {
    assert_eq!(star_display(&["q1", "p1", "--standard"]), mp("q1*p1"));
    assert_eq!(star_display(&["p1", "q1", "--standard"]), mp("q1*p1 - i*λ"));
    assert_eq!(star_display(&["p1^2", "q1^2", "--standard"]), mp("q1^2*p1^2 - 4*i*λ*q1*p1 - 2*λ^2"));
}

#[test]
fn flat_weyl_commutator() {
    let qp = star_display(&["q1", "p1", "--weyl"]);
    let pq = star_display(&["p1", "q1", "--weyl"]);
    assert_eq!(qp, mp("q1*p1 + i*λ/2"));
    assert_eq!(pq, mp("q1*p1 - i*λ/2"));
    assert_eq!(star_display(&["1", "1", "--weyl"]), mp("1"));
}

#[test]
fn star_json_fields() {
    let v = json(&["star", "p1", "q1", "--standard"]);
    assert_eq!(v["chart"], "flat:1");
    assert_eq!(v["ordering"], "standard");
    assert_eq!(v["order"], 3);
    let terms = v["result"].as_array().unwrap();
    assert_eq!(terms.len(), 2);
    assert!(terms.iter().any(|t| t["lambda"] == 1 && t["coeff"] == "-i"));
}

#[test]
fn represent_momentum() {
    let v = json(&["represent", "p1", "--standard"]);
    assert_eq!(v["display"], "-i*λ*∂1");
    let v = json(&["represent", "Hfree", "--weyl", "--chart", "hyperbolic"]);
    let ops = v["operator"].as_array().unwrap();
    assert!(ops.iter().all(|t| t["lambda"] == 2));
}

#[test]
fn chart_files_match_builtin() {
    for (file, name) in [("charts/hyperbolic.json", "hyperbolic"), ("charts/sphere.json", "sphere")] {
        let a = json(&["star", "p1", "p2", "--chart", file, "--order", "2"]);
        let b = json(&["star", "p1", "p2", "--chart", name, "--order", "2"]);
        assert_eq!(a["result"], b["result"], "{file}");
    }
    let v = json(&["star", "p1", "q1", "--chart", "charts/weighted_flat.json", "--order", "2"]);
    assert!(v["display"].is_string());
}

#[test]
fn output_is_deterministic() {
    let args = ["check", "assoc", "--chart", "hyperbolic", "--samples", "2", "--seed", "7"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn checks_pass_and_exit_zero() {
    for which in ["fedosov", "time-reversal", "equivalence"] {
        let o = run(&["check", which, "--chart", "flat:2", "--samples", "2", "--order", "2"]);
        assert_eq!(o.status.code(), Some(0), "{which}: {}", stdout(&o));
        assert!(stdout(&o).trim_end().ends_with("ALL PASS"));
    }
    let v = json(&["check", "trace", "--chart", "flat:1", "--samples", "1", "--input", "Hfree"]);
    assert_eq!(v["passed"], true);
}

#[test]
fn errors_exit_two() {
    let o = run(&["star", "q1", "p1", "--chart", "missing.json"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    let o = run(&["wkb", "--energy", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["star", "q3", "p1", "--chart", "flat:2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn wkb_default_example() {
    let o = run(&["wkb"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert_eq!(s.matches("VERIFIED").count(), 3);
    assert!(s.contains("L = -2*i*∂1"));
}

#[test]
fn dyn_group_lines() {
    let o = run(&["dyn", "p1^3", "--potential", "q1^3", "--order", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(!s.contains("FAIL "));
    assert!(s.contains("PASS"));
}

#[test]
fn series_inverse() {
    let o = run(&["series", "0:1", "1:1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("inverse (through λ^5): 0:1 1:-1 2:1 3:-1 4:1 5:-1"));
    let v = json(&["series", "--class", "laurent", "--", "-1:2", "0:1"]);
    assert_eq!(v["order"], "-1");
    let o = run(&["series", "--class", "power", "--", "-1:1"]);
    assert_ne!(o.status.code(), Some(0));
}
