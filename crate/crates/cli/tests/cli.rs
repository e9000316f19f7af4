use std::io::Write;
use std::process::{Command, Output, Stdio};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hopf-dse"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

const INTRO: &str = "\
vars 3
eq 1
ops 1.. : (1+h1)^(1+2*q) * (1-h2)^(-q) * (1-h3)^(-2*q)
eq 2
op 1 : (1+h1)^2 * (1-h3)^(-2)
eq 3
op 1 : (1+h1)^2 * (1-h2)^(-1) * (1-h3)^(-1)
";

fn intro_file() -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(INTRO.as_bytes()).unwrap();
    f
}

#[test]
fn solve_introduction_system() {
    let f = intro_file();
    let o = run(&["solve", "-N", "2", f.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let line = out.lines().find(|l| l.starts_with("x1(2) =")).expect("degree-2 line");
    assert!(line.contains("3 * (1.1: (1.1:))"), "{}", line);
}

#[test]
fn lambda_table_for_square() {
    let o = run(&["lambda", "-N", "5", "--family", "vars 1; eq 1; op 1 : (1+h1)^2"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    for (n, v) in [(1, 2), (2, 3), (3, 4), (4, 5)] {
        assert!(out.contains(&format!("lambda[1; 1.1; n={}] = {}", n, v)), "{}", out);
    }
    assert!(out.contains("lambda_n = 2 + 1*(n-1)"), "{}", out);
    assert!(out.contains("alpha=2 beta=-1/2"), "{}", out);
}

#[test]
fn check_hopf_exit_codes() {
    let ok = run(&["check-hopf", "-N", "4", "--family", "family case1 lambda=2 mu=3 J=1,2"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    assert!(stdout(&ok).contains("Hopf up to degree 4"));

    let bad = run(&[
        "check-hopf",
        "-N",
        "3",
        "--format",
        "structured",
        "--family",
        "vars 1; eq 1; op 1 : 1+h1; op 2 : 1+2*h1",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let out = stdout(&bad);
    assert!(out.contains("verdict not-hopf"));
    assert!(out.contains("certificate-verified true"));
}

#[test]
fn classify_verdicts() {
    let c1 = run(&["classify", "--family", "vars 1; eq 1; op 1 : (1+h1)^2"]);
    assert_eq!(c1.status.code(), Some(0));
    assert!(stdout(&c1).contains("lambda = 1, mu = -1"), "{}", stdout(&c1));

    let none = run(&["classify", "--family", "vars 1; eq 1; op 1 : 1 + h1 + h1^3"]);
    assert_eq!(none.status.code(), Some(1), "{}", stdout(&none));
}

#[test]
fn input_errors_exit_with_two() {
    let o = run(&["solve", "--family", "vars 1; eq 1; op 1 : (1+h1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let zero = run(&["solve", "--family", "vars 1; eq 1; op 1 : h1"]);
    assert_eq!(zero.status.code(), Some(2));

    let missing = run(&["solve", "/nonexistent/system.txt"]);
    assert_eq!(missing.status.code(), Some(2));

    let structured = run(&["solve", "--format", "structured", "--family", "vars 0"]);
    assert_eq!(structured.status.code(), Some(2));
    assert!(stdout(&structured).contains("status error"));
}

#[test]
fn permissive_keeps_vanishing_constant_terms() {
    let spec = "vars 1; eq 1; op 1 : 1 + h1; op 2 : h1";
    assert_eq!(run(&["check-hopf", "--strict", "--family", spec]).status.code(), Some(2));
    let o = run(&["check-hopf", "--permissive", "-N", "3", "--family", spec]);
    assert_ne!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stdout(&o).contains("kept (1.2)"), "{}", stdout(&o));
}

#[test]
fn structured_output_is_stable() {
    let f = intro_file();
    let args = ["lambda", "-N", "4", "--format", "structured", f.path().to_str().unwrap()];
    let a = stdout(&run(&args));
    let b = stdout(&run(&args));
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert_eq!(lines[0], "hopf-dse-report v1");
    assert_eq!(lines[1], "command lambda");
    assert_eq!(*lines.last().unwrap(), "end");
    assert!(lines.iter().all(|l| !l.is_empty() && l.split_once(' ').is_some() || *l == "end"));
}

#[test]
fn build_then_solve_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("built.sys");
    let spec = "family fundamental; vertex 1 I0 beta=-1/3 J=1..; vertex 2 J0; vertex 3 I0 beta=1; scale 1 3";
    let o = run(&["build", "--family", spec, "-o", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let built = std::fs::read_to_string(&path).unwrap();
    assert!(built.starts_with("vars 3\n"));

    let from_file = stdout(&run(&["solve", "-N", "3", path.to_str().unwrap()]));
    let from_spec = stdout(&run(&["solve", "-N", "3", "--family", spec]));
    assert_eq!(from_file, from_spec);
    let f = intro_file();
    let handwritten = stdout(&run(&["solve", "-N", "3", f.path().to_str().unwrap()]));
    assert_eq!(from_file, handwritten);
}

#[test]
fn reads_stdin() {
    let mut child = bin()
        .args(["solve", "-N", "2", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(INTRO.as_bytes()).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("3 * (1.1: (1.1:))"));
}

#[test]
fn selftest_passes_with_explicit_seed() {
    let o = run(&["selftest", "-N", "5", "--seed", "7", "--format", "structured"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.lines().filter(|l| l.starts_with("check ")).all(|l| l.starts_with("check true")));
    assert!(out.contains("status ok"));
}

#[test]
fn prelie_verify_passes() {
    let o = run(&["prelie-verify", "-N", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("Grossman-Larson duality"));
}

#[test]
fn zero_bound_is_rejected() {
    assert_eq!(run(&["solve", "-N", "0", "--family", "vars 1; eq 1; op 1 : 1"]).status.code(), Some(2));
}
