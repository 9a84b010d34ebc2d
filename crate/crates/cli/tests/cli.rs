use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const CYCLE: &str = "(declare-datatypes ((block 0) (tower 0)) (((A) (B)) ((Empty) (Stack (top block) (rest tower)))))
(declare-const x tower) (declare-const y tower)
(assert (and ((_ is Stack) x) ((_ is Stack) y) (= y (rest x)) (= x (rest y))))
(check-sat)
";

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_adt-eager"))
        .args(args)
        .env_remove("ADT_EAGER_BACKEND")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn solve_prints_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "cycle.smt2", CYCLE);
    let o = run(&["solve", &q, "--dump-depths", "--dump-stats"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "unsat\n");
    let err = stderr(&o);
    assert!(err.contains("block=2") && err.contains("tower=4"), "{err}");
    assert!(err.contains("\"skolems\":4"), "{err}");
    let o = run(&["solve", &q, "--no-acyclicality"]);
    assert_eq!(stdout(&o), "sat\n");
    let o = run(&["solve", &q, "--oracle"]);
    assert_eq!(stdout(&o), "unsat\n");
}

#[test]
fn solve_reports_unknown_with_exit_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "cycle.smt2", CYCLE);
    let o = run(&["solve", &q, "--backend", "sh -c 'sleep 60' stub", "--timeout", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stdout(&o), "unknown\n");
    assert!(stderr(&o).contains("timeout"), "{}", stderr(&o));
}

#[test]
fn errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.smt2");
    let o = run(&["solve", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).starts_with("error: cannot read"), "{}", stderr(&o));
    let bad = write(dir.path(), "bad.smt2", "(assert (= x))");
    let o = run(&["reduce", &bad]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("frontend:"), "{}", stderr(&o));
    let q = write(dir.path(), "cycle.smt2", CYCLE);
    let o = run(&["solve", &q, "--timeout", "0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn reduce_writes_a_uf_query() {
    let dir = tempfile::tempdir().unwrap();
    let q = write(dir.path(), "cycle.smt2", CYCLE);
    let out = dir.path().join("cycle.uf.smt2");
    let o = run(&["reduce", &q, "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("(set-logic QF_UF)\n"));
    assert!(!text.contains("declare-datatypes"));
    assert_eq!(stdout(&run(&["reduce", &q])), text);
}

#[test]
fn generated_blocks_queries_are_decided() {
    let dir = tempfile::tempdir().unwrap();
    let q = dir.path().join("bw.smt2");
    let q = q.to_str().unwrap();
    let o = run(&["gen-blocksworld", "--blocks", "2", "--steps", "1", "--seed", "4", "-o", q]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let direct = Command::new("z3").arg(q).output().unwrap();
    let o = run(&["solve", q]);
    assert_eq!(stdout(&o), String::from_utf8_lossy(&direct.stdout));
    let o = run(&["gen-blocksworld", "--blocks", "1", "--steps", "1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bench_and_rank() {
    let dir = tempfile::tempdir().unwrap();
    let queries = dir.path().join("queries");
    fs::create_dir(&queries).unwrap();
    write(&queries, "cycle.smt2", CYCLE);
    write(&queries, "easy.smt2", "(declare-datatypes ((t 0)) (((A) (B))))\n(declare-const x t)\n(check-sat)\n");
    let solvers = write(
        dir.path(),
        "solvers.json",
        r#"[{"name": "eager", "command": "z3"}, {"name": "native", "command": "z3", "mode": "direct"}]"#,
    );
    let csv = dir.path().join("runs.csv");
    let o = run(&[
        "bench",
        queries.to_str().unwrap(),
        "--solvers",
        &solvers,
        "--timeout",
        "20",
        "-o",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5, "{text}");
    let o = run(&["rank", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o).lines().count(), 3);

    let liars = write(
        dir.path(),
        "liars.json",
        r#"[{"name": "yes", "command": "sh -c 'echo sat' stub", "mode": "direct"},
            {"name": "no", "command": "sh -c 'echo unsat' stub", "mode": "direct"}]"#,
    );
    let o = run(&["bench", queries.to_str().unwrap(), "--solvers", &liars, "--timeout", "5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("fatal: disagreement on cycle.smt2"), "{}", stderr(&o));
}

#[test]
fn gen_suite_writes_files_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let o = run(&["gen-suite", "--count", "12", "--seed", "3", "-d", d]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let manifest = adt_eager::suite::read_manifest(dir.path()).unwrap();
    assert_eq!(manifest.len(), 12);
    for e in &manifest {
        assert!(dir.path().join(&e.file).is_file(), "{}", e.file);
    }
}
