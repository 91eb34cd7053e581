use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use shoq::model_text::parse_model;
use shoq::parse_kb;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus").join(name)
}

fn shoq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_shoq")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join("cli");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn unsat_exits_one() {
    let o = shoq(&[corpus("example1.kb").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout(&o), "UNSAT\n");
}

#[test]
fn sat_writes_a_model() {
    let model = scratch("example2.model");
    let input = corpus("example2.kb");
    let o = shoq(&[input.to_str().unwrap(), "--model", model.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "SAT\n");
    let kb = parse_kb(&std::fs::read_to_string(&input).unwrap()).unwrap();
    let i = parse_model(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(i.check_model(&kb), Ok(()));
}

#[test]
fn trace_stats_and_dot() {
    let dot = scratch("example1.dot");
    let o = shoq(&[corpus("example1.kb").to_str().unwrap(), "--trace", "--stats", "--dot", dot.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.starts_with("Init v0\n"), "{out}");
    assert!(out.contains("TF v4 -> v5, v6, v7"), "{out}");
    assert!(out.contains("\nUNSAT\nnodes: 14\n"), "{out}");
    assert!(std::fs::read_to_string(&dot).unwrap().starts_with("digraph"));
}

#[test]
fn oracle_check_reports_on_stderr() {
    let o = shoq(&[corpus("nominal_sat.kb").to_str().unwrap(), "--oracle-check"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stderr(&o).contains("oracle: model with"), "{}", stderr(&o));
}

#[test]
fn input_errors_exit_two() {
    let bad = scratch("bad.kb");
    std::fs::write(&bad, "abox a : (A B)\n").unwrap();
    let o = shoq(&[bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("1:13: expected `and` or `or`, found `B`"), "{}", stderr(&o));

    std::fs::write(&bad, "rbox trans r\nabox a : atleast 2 r A\n").unwrap();
    let o = shoq(&[bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("non-simple role r"), "{}", stderr(&o));

    let o = shoq(&[scratch("missing.kb").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = shoq(&[corpus("trivial.kb").to_str().unwrap(), "--ilp-node-budget", "0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn step_limit_is_inconclusive() {
    let o = shoq(&[corpus("example1.kb").to_str().unwrap(), "--max-steps", "1"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).starts_with("inconclusive:"), "{}", stderr(&o));
    assert_eq!(stdout(&o), "");
}
