use std::process::{Command, Output};

fn mcenv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcenv")).args(args).output().expect("spawn mcenv")
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn info_reports_order_and_class() {
    let s = stdout(&mcenv(&["info", "-g", "dihedral(4)"]));
    assert!(s.contains("order: 8"));
    assert!(s.contains("nilpotent: class 2"));
}

#[test]
fn dim_of_s3() {
    let s = stdout(&mcenv(&["dim", "-g", "symmetric(3)"]));
    assert!(s.contains("dim: 2"));
    assert!(s.contains("chain: 6 > 3 > 1"));
}

#[test]
fn envelope_emits_a_formula() {
    let s = stdout(&mcenv(&["envelope", "-g", "alternating(4)", "-s", "1", "--emit-formula"]));
    assert!(s.contains("class: 1"));
    assert!(s.contains("formula: x*p0 = p0*x & x*p1 = p1*x"));
}

#[test]
fn eval_defines_a_centralizer() {
    let dir = std::env::temp_dir().join(format!("mcenv-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("commute.txt");
    std::fs::write(&path, "x*p0 = p0*x").unwrap();
    let s = stdout(&mcenv(&["eval", "-g", "symmetric(3)", "--formula", path.to_str().unwrap(), "--params", "1"]));
    assert_eq!(s.split_whitespace().count(), 2);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn lattice_as_dot() {
    let s = stdout(&mcenv(&["lattice", "-g", "symmetric(3)", "--dot"]));
    assert!(s.starts_with("digraph centralizers {"));
    assert!(s.trim_end().ends_with('}'));
}

#[test]
fn verify_exits_zero_without_failures() {
    let args = ["verify", "-g", "symmetric(3)", "--no-catalog", "--samples", "5", "--triples", "5", "--lemma-samples", "5"];
    let s = stdout(&mcenv(&args));
    assert!(s.trim_end().ends_with("total failures=0"));
}

#[test]
fn unknown_group_is_an_error() {
    let out = mcenv(&["info", "-g", "bogus(3)"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown catalog group"));
}
