use alloc::vec::Vec;

use super::*;
use crate::oracle::{oracle_solve, OracleOptions};
use crate::preprocess::{desugar_ite, flatten};

#[test]
fn example_needs_three_moves() {
    let setup = example_setup();
    for (steps, expected) in [(0, Answer::Unsat), (1, Answer::Unsat), (2, Answer::Unsat), (3, Answer::Sat)] {
        assert_eq!(search_oracle(&setup, steps).unwrap(), expected, "steps={steps}");
    }
    assert_eq!(
        search_oracle_with(&setup, 5, Horizon::AtMost, 6).unwrap(),
        Answer::Sat
    );
    assert_eq!(
        search_oracle_with(&setup, 2, Horizon::AtMost, 6).unwrap(),
        Answer::Unsat
    );
}

#[test]
fn zero_steps_means_equal_configs() {
    let mut setup = example_setup();
    assert_eq!(search_oracle(&setup, 0).unwrap(), Answer::Unsat);
    setup.target = setup.initial.clone();
    assert_eq!(search_oracle(&setup, 0).unwrap(), Answer::Sat);
    // Move a block away and back.
    assert_eq!(search_oracle(&setup, 2).unwrap(), Answer::Sat);
}

#[test]
fn setups_are_deterministic_and_valid() {
    for n in [2, 5, 26] {
        for seed in 0..20 {
            let a = generate_setup(n, seed).unwrap();
            assert_eq!(a, generate_setup(n, seed).unwrap());
            assert!(a.initial.is_valid(n));
            assert!(a.target.is_valid(n));
        }
    }
    assert_eq!(generate_setup(1, 0), Err(BlocksError::BlockCount(1)));
    assert_eq!(generate_setup(27, 0), Err(BlocksError::BlockCount(27)));
}

#[test]
fn search_refuses_large_setups() {
    let setup = generate_setup(7, 1).unwrap();
    assert!(matches!(search_oracle(&setup, 3), Err(BlocksError::TooLarge { .. })));
}

#[test]
fn encoding_uses_every_datatype_kind() {
    let q = encode_query(&example_setup(), 3).unwrap();
    let sig = &q.script.decls.adts;
    for name in ["block", "tower", "config", "place"] {
        assert!(sig.find_adt(name).is_some(), "{name}");
    }
    let tower = sig.find_adt("tower").unwrap();
    let config = sig.find_adt("config").unwrap();
    assert_eq!(sig.adt(config).ctors.len(), 1);
    assert_eq!(sig.adt(tower).ctors.len(), 2);
    assert!(q.text.contains("(assert (= s0 (table (Stack B2 (Stack B1 Empty)) Empty Empty)))"));
    assert!(q.text.contains("(assert (= s3 (table (Stack B2 Empty) (Stack B1 Empty) Empty)))"));
    assert_eq!(encode_query(&example_setup(), 0).unwrap_err(), BlocksError::NoSteps);
}

#[test]
fn oracle_model_replays_as_a_plan() {
    let setup = example_setup();
    let q = encode_query(&setup, 3).unwrap();
    let flat = flatten(&desugar_ite(&q.script));
    let r = oracle_solve(&flat, 3, &OracleOptions::default()).unwrap();
    assert_eq!(r.answer, Answer::Sat);
    let w = r.witness.unwrap();
    let sig = &flat.script.decls.adts;
    let states: Vec<Config> = (0..=3)
        .map(|i| {
            let v = flat.script.store.find_var(&format!("s{i}")).unwrap();
            let value = &w.vars.iter().find(|(x, _)| *x == v).unwrap().1;
            config_from_value(sig, value).unwrap()
        })
        .collect();
    assert!(replay(&setup, &states));
}

#[test]
fn replay_rejects_illegal_sequences() {
    let setup = example_setup();
    let jump = [setup.initial.clone(), setup.target.clone()];
    assert!(!replay(&setup, &jump));
    assert!(!replay(&setup, &[]));
}

#[test]
fn suite_is_deterministic_and_in_range() {
    let a = generate_suite(40, 7);
    let b = generate_suite(40, 7);
    assert_eq!(a.len(), 40);
    for ((ea, qa), (eb, qb)) in a.iter().zip(&b) {
        assert_eq!(ea, eb);
        assert_eq!(qa.text, qb.text);
        assert!((2..=26).contains(&ea.blocks));
        assert!((1..=2 * ea.blocks).contains(&ea.steps));
        assert_eq!(qa.setup.seed, ea.seed);
    }
    let files: BTreeSet<_> = a.iter().map(|(e, _)| e.file.clone()).collect();
    assert_eq!(files.len(), 40);
    assert_ne!(generate_suite(40, 8)[0].0, a[0].0);
}
