use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::NamedTempFile;

const QUINARY: &str = r#"{"n":5,"R":1,"polys":[[{"e":[2,0,0,0,0],"c":"1"},{"e":[0,2,0,0,0],"c":"1"},
    {"e":[0,0,2,0,0],"c":"1"},{"e":[0,0,0,2,0],"c":"1"},{"e":[0,0,0,0,2],"c":"-1"}]]}"#;

fn file(text: &str) -> NamedTempFile {
    let mut f = NamedTempFile::new().unwrap();
    f.write_all(text.as_bytes()).unwrap();
    f
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_circle")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn count_reports_exact_total() {
    let f = file(QUINARY);
    let v = json(&run(&["count", "--system", f.path().to_str().unwrap(), "--P", "10"]));
    assert_eq!(v["count"], 5825);
}

#[test]
fn count_with_congruence_and_box() {
    let f = file(QUINARY);
    let path = f.path().to_str().unwrap();
    let all = json(&run(&["count", "--system", path, "--P", "6", "--box", "0:1,0:1,0:1,0:1,0:1"]));
    let odd = json(&run(&["count", "--system", path, "--P", "6", "--box", "0:1,0:1,0:1,0:1,0:1", "--mod", "1,1,1,1,1;2,2,2,2,2"]));
    assert!(odd["count"].as_u64().unwrap() < all["count"].as_u64().unwrap());
}

#[test]
fn inspect_lists_shape() {
    let f = file(QUINARY);
    let v = json(&run(&["inspect", "--system", f.path().to_str().unwrap()]));
    assert_eq!(v["n"], 5);
    assert_eq!(v["d"], 2);
}

#[test]
fn asym_csv_has_header() {
    let f = file(QUINARY);
    let out = run(&[
        "--format", "csv", "asym", "--system", f.path().to_str().unwrap(),
        "--Plist", "5,10", "--Qmax", "20", "--samples", "1e5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("P,M,prediction,ratio,J,J_std_error,flagged"));
    assert_eq!(lines.filter(|l| !l.is_empty()).count(), 2);
}

#[test]
fn refused_hypothesis_exits_with_two() {
    let f = file(r#"{"n":2,"R":1,"polys":[[{"e":[2,0],"c":"1"},{"e":[0,2],"c":"-1"}]]}"#);
    let out = run(&["bound", "--system", f.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn budget_exhaustion_exits_with_three() {
    let f = file(QUINARY);
    let out = run(&["--budget", "1000", "count", "--system", f.path().to_str().unwrap(), "--P", "50"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bad_input_exits_with_four() {
    let f = file("{ not json");
    assert_eq!(run(&["inspect", "--system", f.path().to_str().unwrap()]).status.code(), Some(4));
    let f = file(QUINARY);
    let out = run(&["count", "--system", f.path().to_str().unwrap(), "--P", "5", "--box", "oops"]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn density_and_bound_run() {
    let f = file(QUINARY);
    let path = f.path().to_str().unwrap();
    let d = json(&run(&["density", "--system", path, "--p", "3", "--N", "3"]));
    assert!(d.is_object());
    let b = json(&run(&["bound", "--system", path]));
    assert!(b.is_object() || b.is_array());
}
