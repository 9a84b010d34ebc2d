use super::*;
use crate::frontend::parse_script;
use crate::preprocess::{desugar_ite, flatten};

const TOWER: &str = "
    (declare-datatypes ((block 0) (tower 0))
      (((A) (B))
       ((Empty) (Stack (top block) (rest tower)))))
";

fn query(body: &str) -> FlatQuery {
    let s = parse_script(&format!("{TOWER}{body}")).unwrap();
    flatten(&desugar_ite(&s))
}

fn decide(body: &str) -> OracleResult {
    let q = query(body);
    let r = oracle_decide(&q, &OracleOptions::default()).unwrap();
    if let Some(w) = &r.witness {
        assert!(check_witness(&q, w).unwrap());
    }
    r
}

#[test]
fn cycle_is_unsat_at_its_bound() {
    let q = query(
        "(declare-const x tower) (declare-const y tower)
         (assert (and ((_ is Stack) x) ((_ is Stack) y) (= y (rest x)) (= x (rest y))))",
    );
    assert!(promotion_bound(&q) <= 5);
    let r = oracle_solve(&q, 5, &OracleOptions::default()).unwrap();
    assert_eq!(r.answer, Answer::Unsat);
}

#[test]
fn small_bound_is_unknown() {
    let q = query("(declare-const x tower) (assert (not (= x x)))");
    let r = oracle_solve(&q, 0, &OracleOptions::default()).unwrap();
    assert_eq!(r.answer, Answer::Unknown("bound".into()));
}

#[test]
fn constructor_witness() {
    let r = decide("(declare-const x tower) (assert (= x (Stack A Empty)))");
    assert_eq!(r.answer, Answer::Sat);
    let w = r.witness.unwrap();
    assert_eq!(w.max_depth(), 1);
}

#[test]
fn self_disequality_is_unsat() {
    assert_eq!(decide("(declare-const x tower) (assert (not (= x x)))").answer, Answer::Unsat);
}

#[test]
fn pigeonhole_over_finite_sort() {
    let r = decide(
        "(declare-const a block) (declare-const b block) (declare-const c block)
         (assert (distinct a b c))",
    );
    assert_eq!(r.answer, Answer::Unsat);
    let r = decide("(declare-const a block) (declare-const b block) (assert (distinct a b))");
    assert_eq!(r.answer, Answer::Sat);
}

#[test]
fn misapplied_selector_is_free() {
    let r = decide("(declare-const x tower) (assert (and (= x Empty) (= (top x) B)))");
    assert_eq!(r.answer, Answer::Sat);
    let w = r.witness.unwrap();
    assert_eq!(w.slots.len(), 1);
    let r = decide(
        "(declare-const x tower) (declare-const y tower)
         (assert (and (= x Empty) (= y Empty) (= (top x) A) (= (top y) B)))",
    );
    assert_eq!(r.answer, Answer::Unsat);
}

#[test]
fn misapplied_selector_avoids_all_values() {
    let r = decide(
        "(declare-const x tower) (declare-const b block)
         (assert (and (= x Empty) (not (= (top x) A)) (not (= (top x) B))))",
    );
    assert_eq!(r.answer, Answer::Unsat);
    let r = decide(
        "(declare-const x tower) (declare-const y tower)
         (assert (and (= x Empty) (not (= (rest x) x)) (not (= (rest x) y))))",
    );
    assert_eq!(r.answer, Answer::Sat);
}

#[test]
fn disjunction_and_booleans() {
    let r = decide(
        "(declare-const x tower) (declare-const p Bool)
         (assert (and (or p ((_ is Empty) x)) (not p) (= (rest x) x)))",
    );
    assert_eq!(r.answer, Answer::Sat);
    let r = decide(
        "(declare-const x tower) (declare-const p Bool)
         (assert (and (= p ((_ is Stack) x)) p (= (rest x) x)))",
    );
    assert_eq!(r.answer, Answer::Unsat);
}

#[test]
fn nesting_counts_constructor_chains() {
    let q = query("(declare-const x tower) (assert (= x (Stack A (Stack B (Stack A Empty)))))");
    assert_eq!(nesting_depth(&q), 3);
}

#[test]
fn sat_is_monotone_in_the_bound() {
    let q = query(
        "(declare-const x tower) (declare-const y tower)
         (assert (and ((_ is Stack) x) (= y (rest x)) ((_ is Stack) y) ((_ is Stack) (rest y))))",
    );
    let first = (0..6)
        .find(|&d| oracle_solve(&q, d, &OracleOptions::default()).unwrap().answer == Answer::Sat)
        .unwrap();
    assert_eq!(first, 3);
    for d in first..8 {
        assert_eq!(oracle_solve(&q, d, &OracleOptions::default()).unwrap().answer, Answer::Sat);
    }
}

#[test]
fn uninterpreted_symbols_are_rejected() {
    let s = parse_script("(declare-sort U 0) (declare-const u U) (assert (= u u))").unwrap();
    let q = flatten(&s);
    assert!(matches!(oracle_decide(&q, &OracleOptions::default()), Err(OracleError::Unsupported(_))));
}
