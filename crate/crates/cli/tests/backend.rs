use std::time::{Duration, Instant};

use adt_eager::backend::{run_backend, run_backend_within, BackendConfig, BackendError};
use adt_eager::pipeline::{reduce_text, solve_text, PipelineError};
use adt_eager_core::reduce::ReduceOptions;
use adt_eager_core::Answer;

const CYCLE: &str = "(declare-datatypes ((block 0) (tower 0)) (((A) (B)) ((Empty) (Stack (top block) (rest tower)))))
(declare-const x tower) (declare-const y tower)
(assert (and ((_ is Stack) x) ((_ is Stack) y) (= y (rest x)) (= x (rest y))))
(check-sat)
";

fn stub(script: &str, secs: u64) -> BackendConfig {
    let cmd = format!("sh -c {} stub", shlex::try_quote(script).unwrap());
    BackendConfig::new("stub", &cmd, Duration::from_secs(secs)).unwrap()
}

fn z3(secs: u64) -> BackendConfig {
    BackendConfig::new("z3", "z3 {file}", Duration::from_secs(secs)).unwrap()
}

#[test]
fn stub_verdicts_are_read_from_stdout() {
    assert_eq!(run_backend(&stub("echo sat", 5), "").unwrap().answer, Answer::Sat);
    assert_eq!(run_backend(&stub("echo unsat", 5), "").unwrap().answer, Answer::Unsat);
    let v = run_backend(&stub("echo unknown", 5), "").unwrap();
    assert!(matches!(v.answer, Answer::Unknown(_)), "{:?}", v.answer);
}

#[test]
fn stub_receives_the_query_file() {
    let v = run_backend(&stub("grep -q 'check-sat' \"$1\" && echo sat", 5), "(check-sat)\n").unwrap();
    assert_eq!(v.answer, Answer::Sat);
}

#[test]
fn hanging_backend_times_out() {
    let start = Instant::now();
    let v = run_backend(&stub("sleep 60", 1), "").unwrap();
    let took = start.elapsed();
    assert_eq!(v.answer, Answer::Unknown("timeout".into()));
    assert!(took >= Duration::from_millis(900) && took < Duration::from_secs(5), "{took:?}");
}

#[test]
fn explicit_limit_overrides_the_configured_one() {
    let start = Instant::now();
    let v = run_backend_within(&stub("sleep 60", 100), "", Duration::from_millis(300)).unwrap();
    assert_eq!(v.answer, Answer::Unknown("timeout".into()));
    assert!(start.elapsed() < Duration::from_secs(5));
}

#[test]
fn killed_backend_is_unknown() {
    let v = run_backend(&stub("kill -9 $$", 5), "").unwrap();
    match v.answer {
        Answer::Unknown(reason) => assert!(reason.contains("signal"), "{reason}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn missing_program_is_a_spawn_error() {
    let cfg = BackendConfig::new("none", "/nonexistent/solver", Duration::from_secs(1)).unwrap();
    assert!(matches!(run_backend(&cfg, ""), Err(BackendError::Spawn { .. })));
}

#[test]
fn bad_commands_are_rejected() {
    let t = Duration::from_secs(1);
    assert!(matches!(BackendConfig::new("x", "", t), Err(BackendError::EmptyCommand)));
    assert!(BackendConfig::new("x", "z3 'unterminated", t).is_err());
    assert!(matches!(BackendConfig::new("x", "z3", Duration::ZERO), Err(BackendError::ZeroTimeout)));
}

#[test]
fn resolve_names_the_backend_after_its_program() {
    let cfg = BackendConfig::resolve(Some("/usr/local/bin/z3 -smt2"), Duration::from_secs(1)).unwrap();
    assert_eq!(cfg.name, "z3");
}

#[test]
fn z3_decides_trivial_uf_queries() {
    let sat = "(set-logic QF_UF)\n(declare-fun p () Bool)\n(assert p)\n(check-sat)\n";
    let unsat = "(set-logic QF_UF)\n(assert false)\n(check-sat)\n";
    assert_eq!(run_backend(&z3(10), sat).unwrap().answer, Answer::Sat);
    assert_eq!(run_backend(&z3(10), unsat).unwrap().answer, Answer::Unsat);
}

#[test]
fn cycle_query_end_to_end() {
    let (v, r) = solve_text(CYCLE, &z3(10), &ReduceOptions::default()).unwrap();
    assert_eq!(v.answer, Answer::Unsat);
    assert_eq!(r.stats.skolems, 4);
    let opts = ReduceOptions {
        acyclicality: false,
        ..ReduceOptions::default()
    };
    let (v, r) = solve_text(CYCLE, &z3(10), &opts).unwrap();
    assert_eq!(v.answer, Answer::Sat);
    assert_eq!(r.stats.axiom3, 0);
}

#[test]
fn reduction_errors_are_labelled() {
    let e = reduce_text("(assert", &ReduceOptions::default()).unwrap_err();
    assert!(matches!(e, PipelineError::Parse(_)));
    assert!(e.to_string().starts_with("frontend:"), "{e}");
}
