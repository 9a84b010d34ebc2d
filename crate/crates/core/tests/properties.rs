use adt_eager_core::depth::{build_graph, compute_depths};
use adt_eager_core::frontend::{parse_script, print_script, print_uf_script};
use adt_eager_core::ir::{Node, Sort};
use adt_eager_core::oracle::{check_witness, oracle_decide, OracleOptions};
use adt_eager_core::preprocess::{desugar_ite, flatten};
use adt_eager_core::random::{random_flat_query, QueryShape};
use adt_eager_core::reduce::{reduce, ReduceOptions};
use adt_eager_core::Answer;
use proptest::prelude::*;

const TOWER: &str = "(declare-datatypes ((block 0) (tower 0)) (((A) (B)) ((Empty) (Stack (top block) (rest tower)))))
(declare-const x tower) (declare-const y tower) (declare-const b block)
";

fn tower_term() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![Just("x".to_string()), Just("y".to_string()), Just("Empty".to_string())];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            inner.clone().prop_map(|t| format!("(rest {t})")),
            (prop_oneof![Just("A"), Just("B"), Just("b")], inner.clone())
                .prop_map(|(h, t)| format!("(Stack {h} {t})")),
            (inner.clone(), inner).prop_map(|(c, e)| format!("(ite (= x y) {c} {e})")),
        ]
    })
}

fn nested_query() -> impl Strategy<Value = String> {
    let atom = prop_oneof![
        (tower_term(), tower_term()).prop_map(|(a, b)| format!("(= {a} {b})")),
        tower_term().prop_map(|t| format!("((_ is Stack) {t})")),
        tower_term().prop_map(|t| format!("(= b (top {t}))")),
    ];
    prop::collection::vec((atom, any::<bool>()), 1..4).prop_map(|atoms| {
        let body: Vec<String> = atoms
            .into_iter()
            .map(|(a, neg)| if neg { format!("(not {a})") } else { a })
            .collect();
        format!("{TOWER}(assert (and {}))\n(check-sat)\n", body.join(" "))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn printing_round_trips(seed in any::<u64>()) {
        let text = random_flat_query(seed, &QueryShape::default());
        let s = parse_script(&text).unwrap();
        let printed = print_script(&s);
        prop_assert_eq!(print_script(&parse_script(&printed).unwrap()), printed);
    }

    #[test]
    fn random_queries_are_already_flat(seed in any::<u64>()) {
        let text = random_flat_query(seed, &QueryShape::default());
        let q = flatten(&parse_script(&text).unwrap());
        prop_assert!(q.fresh.is_empty());
    }

    #[test]
    fn flattening_names_at_most_one_variable_per_application(text in nested_query()) {
        let s = desugar_ite(&parse_script(&text).unwrap());
        let mut seen = std::collections::HashSet::new();
        let mut stack = s.assertions.clone();
        let mut apps = 0;
        while let Some(t) = stack.pop() {
            if seen.insert(t) {
                if matches!(s.store.node(t), Node::App(..)) {
                    apps += 1;
                }
                stack.extend(s.store.children(t).iter().copied());
            }
        }
        let q = flatten(&s);
        prop_assert!(q.fresh.len() <= apps, "{} fresh for {} applications", q.fresh.len(), apps);
    }

    #[test]
    fn sat_witnesses_check(seed in any::<u64>()) {
        let text = random_flat_query(seed, &QueryShape::default());
        let q = flatten(&parse_script(&text).unwrap());
        let r = oracle_decide(&q, &OracleOptions::default()).unwrap();
        if r.answer == Answer::Sat {
            let w = r.witness.expect("sat answers carry a witness");
            prop_assert!(check_witness(&q, &w).unwrap());
        }
    }

    #[test]
    fn depths_grow_with_variables(seed in any::<u64>(), extra in 0usize..4) {
        let text = random_flat_query(seed, &QueryShape::default());
        let s = parse_script(&text).unwrap();
        let sig = &s.decls.adts;
        let g = build_graph(sig);
        let sorts: Vec<Sort> = sig.adt_ids().map(Sort::Adt).collect();
        let fewer = compute_depths(&g, sorts.clone());
        let more = compute_depths(&g, sorts.iter().cycle().take(sorts.len() * (extra + 2)).copied());
        for a in sig.adt_ids() {
            prop_assert!(fewer.get(a) <= more.get(a));
        }
    }

    #[test]
    fn reduction_is_deterministic_and_reparses(seed in any::<u64>()) {
        let text = random_flat_query(seed, &QueryShape::default());
        let q = flatten(&parse_script(&text).unwrap());
        let opts = ReduceOptions::default();
        let (Ok(a), Ok(b)) = (reduce(&q, &opts), reduce(&q, &opts)) else {
            return Ok(());
        };
        let printed = print_uf_script(&a.script);
        prop_assert_eq!(&printed, &print_uf_script(&b.script));
        let reparsed = parse_script(&printed).unwrap();
        prop_assert_eq!(reparsed.decls.adts.adt_count(), 0);
        prop_assert_eq!(print_script(&reparsed), printed);
    }
}
