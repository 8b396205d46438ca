//! End-to-end runs of the `invloc` binary.

mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const DOCUMENTED: [i32; 5] = [0, 2, 3, 4, 5];

fn invloc(args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_invloc"))
        .args(args)
        .output()
        .expect("binary runs");
    let code = out.status.code().expect("exit code");
    assert!(DOCUMENTED.contains(&code), "undocumented exit code {code}");
    if code == 0 {
        assert!(out.stderr.is_empty(), "stderr on success: {}", String::from_utf8_lossy(&out.stderr));
    }
    out
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn data(name: &str) -> String {
    common::data_path(name).to_str().unwrap().to_owned()
}

fn field(text: &str, key: &str) -> String {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` line in:\n{text}"))
        .to_owned()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn forward_four_site_example() {
    let out = invloc(&["forward", &data("example1.inst"), "--objective", "minisum", "--p", "2"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert_eq!(field(&text, "x"), "(0, -1)");
    assert_eq!(field(&text, "f"), "0");
}

#[test]
fn forward_single_site_and_machine_output() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("one.inst");
    fs::write(&inst, "INVLOC 1\nminisum 1 3\n2.5 -4 3 0 0 0 0\n").unwrap();
    let res = dir.path().join("res.txt");
    let out = invloc(&["forward", path_str(&inst), "--out", path_str(&res)]);
    assert_eq!(code(&out), 0);
    assert_eq!(field(&stdout(&out), "x"), "(2.5, -4)");
    let fields: Vec<f64> = fs::read_to_string(&res)
        .unwrap()
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    assert_eq!(&fields[..3], &[2.5, -4.0, 0.0]);
}

#[test]
fn forward_corrupt_file() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("bad.inst");
    fs::write(&inst, "INVLOC 1\nminisum 2 2\n0 0 1 0 0 0 0\n1 one 1 0 0 0 0\n").unwrap();
    let out = invloc(&["forward", path_str(&inst)]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 4"), "{err}");
    assert_eq!(code(&invloc(&["forward", "/nonexistent/file.inst"])), 2);
}

#[test]
fn inverse_four_site_writes_trace_and_plan() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("t.csv");
    let plan = dir.path().join("p.plan");
    let out = invloc(&[
        "inverse",
        &data("example1.inst"),
        "--xbar",
        "0",
        "0",
        "--eps",
        "0.01",
        "--trace",
        path_str(&trace),
        "--out",
        path_str(&plan),
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let cost: f64 = field(&text, "cost").parse().unwrap();
    assert!((39.5..=40.05).contains(&cost), "{cost}");
    let t: usize = field(&text, "iterations").parse().unwrap();
    assert!(t <= 30);

    let csv = fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("k,x,y,cost,delta_w"));
    assert_eq!(lines.count(), t + 1);

    let verify = invloc(&["verify", &data("example1.inst"), path_str(&plan), "--xbar", "0", "0"]);
    assert_eq!(code(&verify), 0, "{}", stdout(&verify));
}

#[test]
fn inverse_eighteen_points() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("t.csv");
    let out = invloc(&["inverse", &data("eighteen.inst"), "--xbar", "3", "5", "--trace", path_str(&trace)]);
    assert_eq!(code(&out), 0);
    let cost: f64 = field(&stdout(&out), "cost").parse().unwrap();
    assert!((71.0..=74.0).contains(&cost), "{cost}");
}

#[test]
fn inverse_outside_hull_is_infeasible() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("t.csv");
    let out = invloc(&["inverse", &data("example1.inst"), "--xbar", "40", "-30", "--trace", path_str(&trace)]);
    assert_eq!(code(&out), 4);
    let out = invloc(&["inverse", &data("unit_square.inst"), "--xbar", "2", "2", "--trace", path_str(&trace)]);
    assert_eq!(code(&out), 4);
    assert_eq!(field(&stdout(&out), "cost"), "none");
}

#[test]
fn inverse_iteration_limit() {
    let dir = TempDir::new().unwrap();
    let trace = dir.path().join("t.csv");
    let out = invloc(&[
        "inverse",
        &data("example1.inst"),
        "--xbar",
        "0",
        "0",
        "--max-iter",
        "2",
        "--trace",
        path_str(&trace),
    ]);
    assert_eq!(code(&out), 3);
}

#[test]
fn inverse_input_errors() {
    let ex = data("example1.inst");
    assert_eq!(code(&invloc(&["inverse", &ex, "--xbar", "0", "0", "--eps", "0"])), 2);
    assert_eq!(code(&invloc(&["inverse", &ex, "--xbar", "0"])), 2);
    assert_eq!(code(&invloc(&["inverse", &ex, "--xbar", "0", "0", "--p", "0.5"])), 2);
    assert_eq!(code(&invloc(&["frobnicate"])), 2);
}

#[test]
fn inverse_batch() {
    let dir = TempDir::new().unwrap();
    for name in ["example1.inst", "unit_square.inst"] {
        fs::copy(common::data_path(name), dir.path().join(name)).unwrap();
    }
    let out = invloc(&["inverse", "--batch", path_str(dir.path()), "--xbar", "0.5", "0.5"]);
    let text = stdout(&out);
    // x_bar = (0.5, 0.5) is outside the hull of the four-site example but inside the square
    assert_eq!(code(&out), 4, "{text}");
    assert!(text.contains("example1.inst: infeasible"), "{text}");
    assert!(text.contains("unit_square.inst: converged"), "{text}");
    for name in ["example1.inst", "unit_square.inst"] {
        assert!(dir.path().join(format!("{name}.trace.csv")).exists());
    }
    assert!(dir.path().join("unit_square.inst.plan").exists());
}

#[test]
fn gen_is_deterministic_and_in_range() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.inst");
    let b = dir.path().join("b.inst");
    for out in [&a, &b] {
        let res = invloc(&["gen", &data("ruspini75.txt"), "--seed", "1", "--out", path_str(out)]);
        assert_eq!(code(&res), 0);
    }
    let text = fs::read(&a).unwrap();
    assert_eq!(text, fs::read(&b).unwrap());

    let inst = invloc::parse_instance(std::str::from_utf8(&text).unwrap()).unwrap();
    assert_eq!(inst.len(), 75);
    for s in &inst.sites {
        for v in [s.weight, s.u_plus, s.c_minus, s.c_plus] {
            assert!((1.0..10.0).contains(&v), "{v}");
        }
        assert!((1.0..10.0).contains(&s.u_minus) && s.u_minus <= s.weight);
    }

    let to_stdout = invloc(&["gen", &data("ruspini75.txt"), "--seed", "1"]);
    assert_eq!(to_stdout.stdout, text);
}

#[test]
fn gen_empty_file() {
    let dir = TempDir::new().unwrap();
    let empty = dir.path().join("empty.txt");
    fs::write(&empty, "# nothing here\n").unwrap();
    assert_eq!(code(&invloc(&["gen", path_str(&empty)])), 2);
}

#[test]
fn verify_known_plans() {
    let dir = TempDir::new().unwrap();
    let ex = data("example1.inst");
    let good = dir.path().join("good.plan");
    fs::write(&good, "INVLOC-PLAN 1 4 40\n0 0 0\n5 5 0\n5 5 0\n7.0710678 0 0\n").unwrap();
    let out = invloc(&["verify", &ex, path_str(&good), "--xbar", "0", "0"]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));

    let original = dir.path().join("orig.plan");
    fs::write(&original, "INVLOC-PLAN 1 4 0\n0 0 0\n0 0 0\n0 0 0\n7.0710678118654755 0 0\n").unwrap();
    assert_eq!(code(&invloc(&["verify", &ex, path_str(&original), "--xbar", "0", "0"])), 5);

    let short = dir.path().join("short.plan");
    fs::write(&short, "INVLOC-PLAN 1 2 0\n0 0 0\n5 5 0\n").unwrap();
    let out = invloc(&["verify", &ex, path_str(&short), "--xbar", "0", "0"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("plan has 2 sites"));
}

#[test]
fn help_goes_to_stdout() {
    let out = invloc(&["--help"]);
    assert_eq!(code(&out), 0);
    for cmd in ["forward", "inverse", "gen", "verify"] {
        assert!(stdout(&out).contains(cmd));
    }
}
