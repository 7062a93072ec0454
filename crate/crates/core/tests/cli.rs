use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use vodnet::report::{Report, ReportStatus};

fn scenario(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn vodnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vodnet")).args(args).output().expect("spawn")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn synthesize_prints_a_table() {
    let out = vodnet(&["synthesize", path_str(&scenario("diamond.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("installed links"));
    assert!(text.contains("12.000000"));
}

#[test]
fn machine_output_parses_back() {
    let out = vodnet(&["synthesize", path_str(&scenario("two_server.json")), "--format", "machine"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let report = Report::from_machine(&text).unwrap();
    assert_eq!(report.status, ReportStatus::Optimal);
    assert!((report.objective.unwrap() - 10.0).abs() <= 1e-6);
    assert_eq!(report.to_machine(), text);
}

#[test]
fn violations_exit_with_one() {
    let out = vodnet(&["validate", path_str(&scenario("bad_overlay.json"))]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8(out.stdout).unwrap().contains("subscriber_adjacency"));
}

#[test]
fn listed_flows_validate_clean() {
    assert_eq!(vodnet(&["validate", path_str(&scenario("routed.json"))]).status.code(), Some(0));
}

#[test]
fn missing_file_exits_with_two() {
    let out = vodnet(&["synthesize", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn malformed_scenario_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{\"entities\": [").unwrap();
    let out = vodnet(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn unknown_subcommand_exits_with_two() {
    assert_eq!(vodnet(&["optimise", "x.json"]).status.code(), Some(2));
}

#[test]
fn out_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = vodnet(&[
        "synthesize",
        path_str(&scenario("capacity_split.json")),
        "--format",
        "machine",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let report = Report::from_machine(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((report.objective.unwrap() - 20.0).abs() <= 1e-6);
    assert_eq!(report.installed_count, 4);
}

#[test]
fn oracle_agrees_with_synthesize() {
    for name in ["diamond.json", "two_server.json", "capacity_split.json", "routed.json"] {
        let p = scenario(name);
        let a = vodnet(&["synthesize", path_str(&p), "--format", "machine"]);
        let b = vodnet(&["oracle", path_str(&p), "--format", "machine"]);
        let a = Report::from_machine(&String::from_utf8(a.stdout).unwrap()).unwrap();
        let b = Report::from_machine(&String::from_utf8(b.stdout).unwrap()).unwrap();
        assert!((a.objective.unwrap() - b.objective.unwrap()).abs() <= 1e-6, "{name}");
    }
}

#[test]
fn repeated_runs_are_byte_identical() {
    for format in ["table", "machine"] {
        let p = scenario("routed.json");
        let first = vodnet(&["synthesize", path_str(&p), "--format", format]).stdout;
        for _ in 0..3 {
            assert_eq!(vodnet(&["synthesize", path_str(&p), "--format", format]).stdout, first);
        }
    }
}
