//! Seeded random flat queries over small random datatype signatures.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Shape limits for [`random_flat_query`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QueryShape {
    pub max_adts: usize,
    pub max_ctors: usize,
    pub max_arity: usize,
    pub max_vars: usize,
    pub max_literals: usize,
}

impl Default for QueryShape {
    fn default() -> Self {
        QueryShape {
            max_adts: 2,
            max_ctors: 3,
            max_arity: 2,
            max_vars: 4,
            max_literals: 6,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum FieldSort {
    Bool,
    Adt(usize),
}

struct Ctor {
    name: String,
    fields: Vec<(String, FieldSort)>,
}

/// A query whose atoms are all flat: `x = y`, `x = f(y, …)`, `x = s(y)`
/// and `is-C(x)` over declared variables, combined with `not`, `and`,
/// `or` and `=>`. The first constructor of every datatype is a constant.
pub fn random_flat_query(seed: u64, shape: &QueryShape) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let adt_count = rng.random_range(1..=shape.max_adts.max(1));
    let mut adts: Vec<Vec<Ctor>> = Vec::new();
    for a in 0..adt_count {
        let ctor_count = rng.random_range(1..=shape.max_ctors.max(1));
        let mut ctors = Vec::new();
        for c in 0..ctor_count {
            let arity = if c == 0 { 0 } else { rng.random_range(0..=shape.max_arity) };
            let fields = (0..arity)
                .map(|i| {
                    let sort = match rng.random_range(0..4u32) {
                        0 => FieldSort::Bool,
                        1 => FieldSort::Adt(rng.random_range(0..adt_count)),
                        _ => FieldSort::Adt(a),
                    };
                    (format!("s{a}_{c}_{i}"), sort)
                })
                .collect();
            ctors.push(Ctor {
                name: format!("K{a}_{c}"),
                fields,
            });
        }
        adts.push(ctors);
    }

    let var_count = rng.random_range(1..=shape.max_vars.max(1));
    let vars: Vec<FieldSort> = (0..var_count)
        .map(|_| {
            if rng.random_range(0..6u32) == 0 {
                FieldSort::Bool
            } else {
                FieldSort::Adt(rng.random_range(0..adt_count))
            }
        })
        .collect();

    let mut out = String::from("(set-logic QF_DT)\n(declare-datatypes (");
    for a in 0..adt_count {
        let _ = write!(out, "(T{a} 0)");
    }
    out.push_str(") (");
    for ctors in &adts {
        out.push('(');
        for c in ctors {
            let _ = write!(out, "({}", c.name);
            for (sel, sort) in &c.fields {
                let _ = write!(out, " ({sel} {})", sort_name(*sort));
            }
            out.push(')');
        }
        out.push(')');
    }
    out.push_str("))\n");
    for (i, sort) in vars.iter().enumerate() {
        let _ = writeln!(out, "(declare-const v{i} {})", sort_name(*sort));
    }

    let literal_count = rng.random_range(1..=shape.max_literals.max(1));
    let mut atoms = Vec::new();
    let mut attempts = 0;
    while atoms.len() < literal_count && attempts < 50 {
        attempts += 1;
        if let Some(a) = random_atom(&mut rng, &adts, &vars) {
            atoms.push(a);
        }
    }
    if atoms.is_empty() {
        atoms.push(String::from("true"));
    }
    let formula = random_skeleton(&mut rng, &mut atoms);
    let _ = writeln!(out, "(assert {formula})\n(check-sat)");
    out
}

fn sort_name(s: FieldSort) -> String {
    match s {
        FieldSort::Bool => String::from("Bool"),
        FieldSort::Adt(a) => format!("T{a}"),
    }
}

fn pick_var(rng: &mut ChaCha8Rng, vars: &[FieldSort], sort: FieldSort) -> Option<usize> {
    let matching: Vec<usize> = (0..vars.len()).filter(|&i| vars[i] == sort).collect();
    (!matching.is_empty()).then(|| matching[rng.random_range(0..matching.len())])
}

fn random_atom(rng: &mut ChaCha8Rng, adts: &[Vec<Ctor>], vars: &[FieldSort]) -> Option<String> {
    let x = rng.random_range(0..vars.len());
    let FieldSort::Adt(a) = vars[x] else {
        return Some(format!("v{x}"));
    };
    match rng.random_range(0..4u32) {
        0 => {
            let y = pick_var(rng, vars, vars[x])?;
            Some(format!("(= v{x} v{y})"))
        }
        1 => {
            let c = &adts[a][rng.random_range(0..adts[a].len())];
            if c.fields.is_empty() {
                return Some(format!("(= v{x} {})", c.name));
            }
            let mut app = format!("({}", c.name);
            for (_, sort) in &c.fields {
                let y = pick_var(rng, vars, *sort)?;
                let _ = write!(app, " v{y}");
            }
            Some(format!("(= v{x} {app}))"))
        }
        2 => {
            let sels: Vec<(&str, FieldSort)> = adts
                .iter()
                .enumerate()
                .flat_map(|(b, ctors)| ctors.iter().map(move |c| (b, c)))
                .flat_map(|(b, c)| c.fields.iter().map(move |(s, f)| (b, s.as_str(), *f)))
                .filter(|&(_, _, f)| f == vars[x])
                .map(|(b, s, _)| (s, FieldSort::Adt(b)))
                .collect();
            if sels.is_empty() {
                return None;
            }
            let (sel, arg_sort) = sels[rng.random_range(0..sels.len())];
            let y = pick_var(rng, vars, arg_sort)?;
            Some(format!("(= v{x} ({sel} v{y}))"))
        }
        _ => {
            let c = &adts[a][rng.random_range(0..adts[a].len())];
            Some(format!("((_ is {}) v{x})", c.name))
        }
    }
}

/// Combines all atoms, each once, into a random Boolean formula.
fn random_skeleton(rng: &mut ChaCha8Rng, atoms: &mut Vec<String>) -> String {
    let mut parts: Vec<String> = atoms
        .drain(..)
        .map(|a| if rng.random_range(0..3u32) == 0 { format!("(not {a})") } else { a })
        .collect();
    while parts.len() > 1 {
        let take = rng.random_range(2..=parts.len().min(3));
        let start = rng.random_range(0..=parts.len() - take);
        let group: Vec<String> = parts.drain(start..start + take).collect();
        let op = match rng.random_range(0..6u32) {
            0..=2 => "and",
            3 | 4 => "or",
            _ => "=>",
        };
        let combined = if op == "=>" {
            format!("(=> {} (and {}))", group[0], group[1..].join(" "))
        } else {
            format!("({op} {})", group.join(" "))
        };
        let combined = if rng.random_range(0..8u32) == 0 {
            format!("(not {combined})")
        } else {
            combined
        };
        parts.insert(start, combined);
    }
    parts.pop().expect("one part")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_script;
    use crate::preprocess::flatten;

    #[test]
    fn queries_parse_and_are_flat() {
        for seed in 0..300 {
            let text = random_flat_query(seed, &QueryShape::default());
            let s = parse_script(&text).unwrap_or_else(|e| panic!("{e}\n{text}"));
            assert!(s.decls.adts.adt_count() <= 2);
            assert!(s.store.var_count() <= 4);
            assert!(s.decls.adts.max_arity() <= 2);
            let q = flatten(&s);
            assert!(q.fresh.is_empty(), "{text}");
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(
            random_flat_query(9, &QueryShape::default()),
            random_flat_query(9, &QueryShape::default())
        );
    }
}
