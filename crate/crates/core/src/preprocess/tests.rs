use alloc::format;
use alloc::string::String;

use super::*;
use crate::frontend::{parse_script, print_script};

const TOWER: &str = "
    (declare-datatypes ((block 0) (tower 0))
      (((A) (B))
       ((Empty) (Stack (top block) (rest tower)))))
    (declare-const a block)
    (declare-const x tower)
    (declare-const y tower)
";

fn script(body: &str) -> Script {
    parse_script(&format!("{TOWER}{body}")).unwrap()
}

fn render(q: &FlatQuery) -> String {
    print_script(&q.script)
}

#[test]
fn nested_constructor_gets_one_fresh_variable() {
    let q = flatten(&script("(assert (= x (Stack a Empty)))"));
    assert_eq!(q.fresh.len(), 1);
    let text = render(&q);
    assert!(text.contains("(assert (= x (Stack a algb!flat!0)))"), "{text}");
    assert!(text.contains("(assert (= algb!flat!0 Empty))"), "{text}");
    let defs: usize = q
        .literals
        .iter()
        .filter(|(_, l)| matches!(l, FlatLiteral::DefEq(..)))
        .count();
    assert_eq!(defs, 2);
}

#[test]
fn flat_cycle_query_is_unchanged() {
    let s = script("(assert (and ((_ is Stack) x) ((_ is Stack) y) (= y (rest x)) (= x (rest y))))");
    let q = flatten(&s);
    assert!(q.fresh.is_empty());
    assert_eq!(q.script.assertions, s.assertions);
    assert_eq!(q.literals.len(), 4);
}

#[test]
fn nested_tester_argument() {
    let s = script("(assert ((_ is Stack) (rest x)))");
    let apps = s.store.app_count(&s.assertions);
    let q = flatten(&s);
    assert_eq!(q.fresh.len(), apps - 1);
    assert!(q
        .literals
        .iter()
        .any(|(_, l)| matches!(l, FlatLiteral::Tester(..))));
}

#[test]
fn boolean_equality_becomes_iff_over_flat_atoms() {
    let s = script("(declare-const p Bool) (assert (= p ((_ is Empty) (rest x))))");
    let q = flatten(&s);
    assert_eq!(q.fresh.len(), 1);
    for (t, _) in &q.literals {
        assert!(FlatLiteral::classify(&q.script, *t).is_some());
    }
}

#[test]
fn flattening_is_idempotent() {
    let bodies = [
        "(assert (= x (Stack (top (rest y)) (rest (rest x)))))",
        "(assert (or (= (Stack a x) (Stack A y)) (not ((_ is Empty) (rest (rest y))))))",
        "(declare-const p Bool) (assert (=> p (distinct x y (rest x))))",
    ];
    for body in bodies {
        let once = flatten(&script(body));
        let twice = flatten(&once.script);
        assert!(twice.fresh.is_empty(), "{body}");
        assert_eq!(render(&once), render(&twice), "{body}");
    }
}

#[test]
fn term_ite_becomes_fresh_variable() {
    let s = script("(assert (= x (ite true x y)))");
    let d = desugar_ite(&s);
    let text = print_script(&d);
    assert!(text.contains("(assert (= x algb!ite!0))"), "{text}");
    assert!(text.contains("(assert (=> true (= algb!ite!0 x)))"), "{text}");
    assert!(text.contains("(assert (=> false (= algb!ite!0 y)))"), "{text}");
}

#[test]
fn boolean_ite_is_expanded() {
    let s = parse_script(
        "(declare-const p Bool) (declare-const q Bool) (declare-const r Bool) (assert (ite p q r))",
    )
    .unwrap();
    let text = print_script(&desugar_ite(&s));
    assert!(text.contains("(assert (or (and p q) (and (not p) r)))"), "{text}");
}

#[test]
fn ite_free_script_is_identical() {
    let s = script("(assert (= x (Stack a y)))");
    let d = desugar_ite(&s);
    assert_eq!(d.assertions, s.assertions);
    assert_eq!(print_script(&d), print_script(&s));
}
