//! Finite universes: datatypes with finitely many values.

use alloc::vec::Vec;

use crate::depth::AdtGraph;
use crate::ir::{AdtId, AdtSignature, NormalTerm, Sort};

/// Default bound on the number of values enumerated per datatype.
pub const DEFAULT_UNIVERSE_CAP: usize = 4096;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Universe {
    /// Number of values; `None` when infinite. Saturates at `usize::MAX`.
    pub size: Option<usize>,
    /// All values in declaration order, when finite and within the cap.
    pub values: Option<Vec<NormalTerm>>,
}

impl Universe {
    pub fn is_finite(&self) -> bool {
        self.size.is_some()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UniverseInfo {
    pub adts: Vec<Universe>,
}

impl UniverseInfo {
    pub fn get(&self, a: AdtId) -> &Universe {
        &self.adts[a.index()]
    }
}

/// A datatype is finite iff it is not recursive and every field sort is
/// `Bool` (2 values) or a finite datatype. Its size is the sum over
/// constructors of the product of the field sizes.
pub fn universe_info(sig: &AdtSignature, g: &AdtGraph, cap: usize) -> UniverseInfo {
    let n = sig.adt_count();
    let mut sizes: Vec<Option<Option<usize>>> = alloc::vec![None; n];
    for a in sig.adt_ids() {
        size_of(sig, g, a, &mut sizes);
    }
    let mut values: Vec<Option<Vec<NormalTerm>>> = alloc::vec![None; n];
    for a in sig.adt_ids() {
        if matches!(sizes[a.index()], Some(Some(s)) if s <= cap) {
            enumerate(sig, a, &mut values);
        }
    }
    let adts = sizes
        .into_iter()
        .zip(values)
        .map(|(size, values)| Universe {
            size: size.flatten(),
            values,
        })
        .collect();
    UniverseInfo { adts }
}

fn size_of(sig: &AdtSignature, g: &AdtGraph, a: AdtId, memo: &mut Vec<Option<Option<usize>>>) -> Option<usize> {
    if let Some(s) = memo[a.index()] {
        return s;
    }
    let size = if g.is_recursive(a) {
        None
    } else {
        let mut total: Option<usize> = Some(0);
        for &c in &sig.adt(a).ctors {
            let mut product: Option<usize> = Some(1);
            for field in sig.ctor_fields(c).collect::<Vec<_>>() {
                let f = match field {
                    Sort::Bool => Some(2),
                    Sort::Uninterpreted(_) => None,
                    Sort::Adt(b) => size_of(sig, g, b, memo),
                };
                product = match (product, f) {
                    (Some(p), Some(f)) => Some(p.saturating_mul(f)),
                    _ => None,
                };
            }
            total = match (total, product) {
                (Some(t), Some(p)) => Some(t.saturating_add(p)),
                _ => None,
            };
        }
        total
    };
    memo[a.index()] = Some(size);
    size
}

fn enumerate(sig: &AdtSignature, a: AdtId, memo: &mut Vec<Option<Vec<NormalTerm>>>) -> Vec<NormalTerm> {
    if let Some(v) = &memo[a.index()] {
        return v.clone();
    }
    let mut out = Vec::new();
    for &c in &sig.adt(a).ctors {
        let field_values: Vec<Vec<NormalTerm>> = sig
            .ctor_fields(c)
            .collect::<Vec<_>>()
            .into_iter()
            .map(|s| match s {
                Sort::Bool => alloc::vec![NormalTerm::Bool(false), NormalTerm::Bool(true)],
                Sort::Adt(b) => enumerate(sig, b, memo),
                Sort::Uninterpreted(_) => unreachable!("finite datatypes have no uninterpreted fields"),
            })
            .collect();
        let mut index = alloc::vec![0usize; field_values.len()];
        loop {
            let args = index
                .iter()
                .zip(&field_values)
                .map(|(&i, vals)| vals[i].clone())
                .collect();
            out.push(NormalTerm::App(c, args));
            // Odometer increment, last field fastest.
            let mut done = true;
            for pos in (0..index.len()).rev() {
                index[pos] += 1;
                if index[pos] < field_values[pos].len() {
                    done = false;
                    break;
                }
                index[pos] = 0;
            }
            if done {
                break;
            }
        }
    }
    memo[a.index()] = Some(out.clone());
    out
}
