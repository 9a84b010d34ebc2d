use std::fs;
use std::path::Path;
use std::time::Duration;

use adt_eager::harness::{bench, load_solvers, read_csv, render_report, write_csv, HarnessError, Mode, SolverSpec};
use adt_eager_core::rank::{contribution_rank, RunRecord};
use adt_eager_core::Answer;

const SAT: &str = "(declare-datatypes ((t 0)) (((A) (B))))\n(declare-const x t)\n(assert ((_ is A) x))\n(check-sat)\n";
const UNSAT: &str = "(declare-datatypes ((t 0)) (((A) (B))))\n(declare-const x t)\n(assert (and ((_ is A) x) ((_ is B) x)))\n(check-sat)\n";

fn spec(name: &str, command: &str, mode: Mode) -> SolverSpec {
    SolverSpec {
        name: name.into(),
        command: command.into(),
        mode,
    }
}

fn queries(dir: &Path) {
    fs::write(dir.join("a.smt2"), SAT).unwrap();
    fs::write(dir.join("b.smt2"), UNSAT).unwrap();
    fs::write(dir.join("notes.txt"), "ignored").unwrap();
}

#[test]
fn every_solver_runs_on_every_query() {
    let dir = tempfile::tempdir().unwrap();
    queries(dir.path());
    let solvers = [spec("eager", "z3", Mode::Reduce), spec("native", "z3", Mode::Direct)];
    let out = bench(dir.path(), &solvers, Duration::from_secs(20), 2).unwrap();
    let got: Vec<(&str, &str, &Answer)> = out
        .records
        .iter()
        .map(|r| (r.query.as_str(), r.solver.as_str(), &r.answer))
        .collect();
    assert_eq!(
        got,
        [
            ("a.smt2", "eager", &Answer::Sat),
            ("a.smt2", "native", &Answer::Sat),
            ("b.smt2", "eager", &Answer::Unsat),
            ("b.smt2", "native", &Answer::Unsat),
        ]
    );
    assert!(out.disagreements.is_empty());
}

#[test]
fn timeouts_are_recorded() {
    let dir = tempfile::tempdir().unwrap();
    queries(dir.path());
    let solvers = [spec("slow", "sh -c 'sleep 60' stub", Mode::Direct)];
    let out = bench(dir.path(), &solvers, Duration::from_millis(500), 1).unwrap();
    assert_eq!(out.records.len(), 2);
    for r in &out.records {
        assert!(r.timeout, "{r:?}");
        assert_eq!(r.answer, Answer::Unknown("timeout".into()));
        assert!(r.seconds < 5.0);
    }
}

#[test]
fn contradicting_solvers_are_flagged() {
    let dir = tempfile::tempdir().unwrap();
    queries(dir.path());
    let solvers = [
        spec("yes", "sh -c 'echo sat' stub", Mode::Direct),
        spec("no", "sh -c 'echo unsat' stub", Mode::Direct),
    ];
    let out = bench(dir.path(), &solvers, Duration::from_secs(5), 1).unwrap();
    assert_eq!(out.disagreements.len(), 2);
    assert_eq!(out.disagreements[0].query, "a.smt2");
    assert_eq!(out.disagreements[0].sat, ["yes"]);
    assert_eq!(out.disagreements[0].unsat, ["no"]);
}

#[test]
fn configuration_errors() {
    let dir = tempfile::tempdir().unwrap();
    queries(dir.path());
    let t = Duration::from_secs(1);
    assert!(matches!(bench(dir.path(), &[], t, 1), Err(HarnessError::NoSolvers)));
    let dup = [spec("z", "z3", Mode::Direct), spec("z", "z3", Mode::Reduce)];
    assert!(matches!(bench(dir.path(), &dup, t, 1), Err(HarnessError::DuplicateSolver(_))));
    let missing = [spec("gone", "/nonexistent/solver", Mode::Direct)];
    assert!(matches!(bench(dir.path(), &missing, t, 1), Err(HarnessError::Backend(_))));
}

#[test]
fn solver_files_default_to_reduce_mode() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("solvers.json");
    fs::write(
        &path,
        r#"[{"name": "eager", "command": "z3"}, {"name": "native", "command": "z3 {file}", "mode": "direct"}]"#,
    )
    .unwrap();
    let got = load_solvers(&path).unwrap();
    assert_eq!(got, [spec("eager", "z3", Mode::Reduce), spec("native", "z3 {file}", Mode::Direct)]);
    fs::write(&path, "[{\"name\": 3}]").unwrap();
    assert!(matches!(load_solvers(&path), Err(HarnessError::Config { .. })));
}

#[test]
fn csv_round_trip() {
    let records = vec![
        RunRecord {
            query: "q1.smt2".into(),
            solver: "a".into(),
            answer: Answer::Sat,
            seconds: 0.25,
            timeout: false,
        },
        RunRecord {
            query: "q1.smt2".into(),
            solver: "b".into(),
            answer: Answer::Unknown("timeout".into()),
            seconds: 2.0,
            timeout: true,
        },
        RunRecord {
            query: "q,2.smt2".into(),
            solver: "a".into(),
            answer: Answer::Unsat,
            seconds: 0.0,
            timeout: false,
        },
    ];
    let mut buf = Vec::new();
    write_csv(&records, &mut buf).unwrap();
    let text = String::from_utf8(buf.clone()).unwrap();
    assert!(text.starts_with("query,solver,verdict,seconds,timeout\n"), "{text}");
    assert_eq!(read_csv(buf.as_slice()).unwrap(), records);
    let bad = "query,solver,verdict,seconds,timeout\nq,a,maybe,1.0,false\n";
    assert!(matches!(read_csv(bad.as_bytes()), Err(HarnessError::Verdict { line: 2, .. })));
}

#[test]
fn report_lists_solvers_in_rank_order() {
    let rec = |q: &str, s: &str, a: Answer| RunRecord {
        query: q.into(),
        solver: s.into(),
        answer: a,
        seconds: 1.0,
        timeout: false,
    };
    let records = vec![
        rec("q1", "lone", Answer::Sat),
        rec("q2", "lone", Answer::Sat),
        rec("q1", "dup", Answer::Sat),
        rec("q2", "dup", Answer::Unknown("timeout".into())),
    ];
    let report = contribution_rank(&records).unwrap();
    let text = render_report(&report);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[1].contains("lone") && lines[2].contains("dup"), "{text}");
}
