use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use latesched_core::io::parse_result;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn latesched(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_latesched"))
        .args(args)
        .env_remove("LATESCHED_ORACLE_LIMIT")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn arg(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn solve_alg3_fixture_a() {
    let dir = tempfile::tempdir().unwrap();
    let result = dir.path().join("result.json");
    let out = latesched(&["solve", "--alg", "3", "--input", arg(&data("fixture_a.json")), "--output", arg(&result)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = parse_result(&std::fs::read_to_string(result).unwrap()).unwrap();
    assert_eq!(doc.max_lateness, 2);
    assert_eq!(doc.total_cost, 5);
    assert!(doc.feasible);
}

#[test]
fn solve_writes_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trace.csv");
    let out =
        latesched(&["solve", "--alg", "3", "--input", arg(&data("fixture_a.json")), "--trace", "--csv", arg(&csv)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("\"terminal_reason\""));
    let text = std::fs::read_to_string(csv).unwrap();
    assert!(text.starts_with("h,lambda,delta_min,L,cost\n"), "{text}");
}

#[test]
fn infeasible_result_exits_2() {
    // Algorithm 1 ignores the budget; Fixture A needs cost 8 at U = 5.
    let out = latesched(&["solve", "--alg", "1", "--input", arg(&data("fixture_a.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("\"feasible\": false"));
}

#[test]
fn analyze_fixture_b() {
    let out = latesched(&["analyze", "--input", arg(&data("fixture_b.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("{J2} overflow J2 r(K)=1 e=J1 delta=5"), "{text}");
    assert!(text.contains("gaps:\n  (8, 9)\n"), "{text}");
}

#[test]
fn gen_matches_golden() {
    let out = latesched(&[
        "gen",
        "--n",
        "5",
        "--seed",
        "1",
        "--max-processing",
        "3",
        "--horizon",
        "15",
        "--cost-max",
        "2",
        "--budget",
        "fraction:0.5",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), std::fs::read_to_string(data("gen_n5_seed1.json")).unwrap());
}

#[test]
fn gen_requires_seed() {
    assert_eq!(latesched(&["gen", "--n", "3"]).status.code(), Some(1));
}

#[test]
fn verify_small_batch_passes() {
    let out = latesched(&["verify", "--alg", "2", "--trials", "10", "--seed", "7", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert_eq!(text.lines().filter(|l| l.starts_with("trial ")).count(), 10);
    assert!(text.ends_with("alg2: 10 trials, 0 violations\n"), "{text}");
}

#[test]
fn verify_is_deterministic() {
    let args = ["verify", "--alg", "3", "--trials", "6", "--seed", "3", "--n", "4"];
    assert_eq!(latesched(&args).stdout, latesched(&args).stdout);
}

#[test]
fn oracle_fixture_a() {
    let out = latesched(&["oracle", "--input", arg(&data("fixture_a.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\"generic_optimum\": -1"), "{text}");
}

#[test]
fn oracle_limit_exits_2() {
    let out = Command::new(env!("CARGO_BIN_EXE_latesched"))
        .args(["oracle", "--input", arg(&data("fixture_b.json"))])
        .env("LATESCHED_ORACLE_LIMIT", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(latesched(&[]).status.code(), Some(1));
    assert_eq!(latesched(&["solve", "--alg", "4", "--input", "x.json"]).status.code(), Some(1));
    assert_eq!(latesched(&["verify", "--alg", "1", "--trials", "1", "--seed", "0", "--n", "2"]).status.code(), Some(1));
    assert_eq!(latesched(&["solve", "--alg", "2", "--input", "missing.json"]).status.code(), Some(1));
}

#[test]
fn help_exits_0() {
    assert_eq!(latesched(&["--help"]).status.code(), Some(0));
}
