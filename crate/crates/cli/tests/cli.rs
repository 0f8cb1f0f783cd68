use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use mcflow_core::Instance;

fn mcflow(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_mcflow"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut pipe = child.stdin.take().unwrap();
    pipe.write_all(stdin.unwrap_or("").as_bytes()).unwrap();
    drop(pipe);
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn field(report: &str, key: &str) -> f64 {
    report
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key} ")))
        .unwrap()
        .parse()
        .unwrap()
}

const FEASIBLE: &str = "p mcf 2 1 1\na 1 2 1\nc 1 2 1\n";
const INFEASIBLE: &str = "p mcf 2 1 1\na 1 2 1\nc 1 2 2\n";

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_exit_codes() {
    let o = mcflow(&["solve"], Some(FEASIBLE));
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.starts_with("verdict FEASIBLE\n"));
    assert!(field(&out, "objective") <= 1e-9);
    assert!(out.contains("\nf 1 1 2 1 "));

    for method in ["coord", "pgd"] {
        let o = mcflow(&["solve", "-", "--method", method], Some(INFEASIBLE));
        assert_eq!(code(&o), 1);
        let out = stdout(&o);
        assert!(out.starts_with("verdict INFEASIBLE\n"));
        assert!((field(&out, "objective") - 1.0 / 3.0).abs() < 1e-8);
    }

    let o = mcflow(&["solve"], Some("p mcf 2 1 1\na 1 1 1\nc 1 2 1\n"));
    assert_eq!(code(&o), 10);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn solve_unconverged_is_undecided_and_trace_is_written() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("trace.csv");
    let o = mcflow(
        &[
            "solve",
            "--max-iters",
            "1",
            "--trace",
            trace.to_str().unwrap(),
        ],
        Some(INFEASIBLE),
    );
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).starts_with("verdict UNDECIDED\n"));
    let csv = std::fs::read_to_string(&trace).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next(),
        Some("iteration,objective,used_residual,unused_residual")
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn usage_errors_exit_10() {
    assert_eq!(
        code(&mcflow(&["solve", "--method", "newton"], Some(FEASIBLE))),
        10
    );
    assert_eq!(code(&mcflow(&["solve", "--tol", "0"], Some(FEASIBLE))), 10);
    assert_eq!(code(&mcflow(&["frobnicate"], None)), 10);
    assert_eq!(code(&mcflow(&["solve", "/no/such/file"], None)), 10);
    assert_eq!(code(&mcflow(&["--help"], None)), 0);
}

#[test]
fn check_flow_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let inst = write(dir.path(), "one.mcf", FEASIBLE);
    let good = write(dir.path(), "good.flow", "s 0 0 0\nf 1 1 2 1 1\n");
    let o = mcflow(&["check", &inst, "--flow", &good], None);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).starts_with("ok true\n"));

    let over = write(dir.path(), "over.flow", "f 1 1 2 1 2\n");
    let inst2 = write(dir.path(), "two.mcf", INFEASIBLE);
    let o = mcflow(&["check", &inst2, "--flow", &over], None);
    assert_eq!(code(&o), 1);
    assert_eq!(field(&stdout(&o), "max_capacity_violation"), 1.0);

    let missing = dir.path().join("absent.flow");
    assert_eq!(
        code(&mcflow(
            &["check", &inst, "--flow", missing.to_str().unwrap()],
            None
        )),
        11
    );
    let wrong = write(dir.path(), "wrong.flow", "f 1 1 2 7 1\n");
    assert_eq!(code(&mcflow(&["check", &inst, "--flow", &wrong], None)), 11);
}

#[test]
fn solve_output_checks_clean() {
    let dir = tempfile::tempdir().unwrap();
    let text = "p mcf 4 4 1\na 1 2 1.5\na 2 4 1.5\na 1 3 2.5\na 3 4 2.5\nc 1 4 4\n";
    let inst = write(dir.path(), "split.mcf", text);
    let o = mcflow(&["solve", &inst], None);
    assert_eq!(code(&o), 0);
    let report = write(dir.path(), "report.txt", &stdout(&o));
    assert_eq!(code(&mcflow(&["check", &inst, "--flow", &report], None)), 0);
}

#[test]
fn generate_is_deterministic_and_parseable() {
    let args = [
        "generate",
        "--vertices",
        "6",
        "--arcs",
        "10",
        "--commodities",
        "3",
        "--seed",
        "7",
    ];
    let a = mcflow(&args, None);
    let b = mcflow(&args, None);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let inst = Instance::parse(&stdout(&a)).unwrap();
    assert_eq!(
        (
            inst.vertex_count(),
            inst.arc_count(),
            inst.commodity_count()
        ),
        (6, 10, 3)
    );

    assert_eq!(code(&mcflow(&["generate", "--vertices", "1"], None)), 10);
    assert_eq!(
        code(&mcflow(
            &["generate", "--vertices", "3", "--arcs", "7", "--simple"],
            None
        )),
        10
    );
}

#[test]
fn verify_against_oracle() {
    let o = mcflow(&["verify", "--random", "50", "--seed", "1"], None);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("\nagree 50 disagree 0 undecided 0\n"));

    for (text, expect) in [(FEASIBLE, "FEASIBLE"), (INFEASIBLE, "INFEASIBLE")] {
        let o = mcflow(&["verify"], Some(text));
        assert_eq!(code(&o), 0);
        let row = stdout(&o).lines().nth(1).unwrap().to_string();
        assert!(row.split_whitespace().nth(1) == Some(expect), "{row}");
        assert!(row.contains("yes"));
    }

    let big = mcflow(
        &[
            "generate",
            "--vertices",
            "9",
            "--arcs",
            "3",
            "--commodities",
            "1",
        ],
        None,
    );
    let o = mcflow(&["verify"], Some(&stdout(&big)));
    assert_eq!(code(&o), 12);
}
