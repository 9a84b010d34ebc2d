//! The datatype reference graph and the per-datatype acyclicality bound.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::ir::{AdtId, AdtSignature, Sort};

/// `A → B` iff some constructor of `A` has a field of sort `B`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AdtGraph {
    succ: Vec<Vec<AdtId>>,
    /// `reach[a][b]`: a path of length ≥ 1 leads from `a` to `b`.
    reach: Vec<Vec<bool>>,
}

pub fn build_graph(sig: &AdtSignature) -> AdtGraph {
    let n = sig.adt_count();
    let mut succ = alloc::vec![Vec::new(); n];
    for a in sig.adt_ids() {
        let out: &mut Vec<AdtId> = &mut succ[a.index()];
        for &c in &sig.adt(a).ctors {
            for s in sig.ctor_fields(c) {
                if let Sort::Adt(b) = s {
                    if !out.contains(&b) {
                        out.push(b);
                    }
                }
            }
        }
        out.sort();
    }
    let mut reach = alloc::vec![alloc::vec![false; n]; n];
    for a in 0..n {
        let mut stack: Vec<AdtId> = succ[a].clone();
        while let Some(b) = stack.pop() {
            if !core::mem::replace(&mut reach[a][b.index()], true) {
                stack.extend(&succ[b.index()]);
            }
        }
    }
    AdtGraph { succ, reach }
}

impl AdtGraph {
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    pub fn successors(&self, a: AdtId) -> &[AdtId] {
        &self.succ[a.index()]
    }

    /// All edges, ordered by source then target.
    pub fn edges(&self) -> impl Iterator<Item = (AdtId, AdtId)> + '_ {
        self.succ.iter().enumerate().flat_map(|(a, out)| {
            out.iter().map(move |&b| (AdtId(a as u32), b))
        })
    }

    /// Whether a non-empty path leads from `a` to `b`.
    pub fn reaches(&self, a: AdtId, b: AdtId) -> bool {
        self.reach[a.index()][b.index()]
    }

    /// Whether `a` lies on a cycle, i.e. its values can nest unboundedly.
    pub fn is_recursive(&self, a: AdtId) -> bool {
        self.reaches(a, a)
    }
}

/// Distinct datatypes that reach each other.
pub fn mutually_recursive(g: &AdtGraph, a: AdtId, b: AdtId) -> bool {
    a != b && g.reaches(a, b) && g.reaches(b, a)
}

/// Per-datatype bound `k` on the length of selector chains that receive
/// acyclicality axioms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthMap {
    k: Vec<usize>,
}

impl DepthMap {
    pub fn get(&self, a: AdtId) -> usize {
        self.k[a.index()]
    }

    pub fn max(&self) -> usize {
        self.k.iter().copied().max().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (AdtId, usize)> + '_ {
        self.k.iter().enumerate().map(|(i, &k)| (AdtId(i as u32), k))
    }

    /// One `name=k` line per datatype, in declaration order.
    pub fn render(&self, sig: &AdtSignature) -> String {
        let mut out = String::new();
        for (a, k) in self.iter() {
            let _ = writeln!(out, "{}={k}", sig.adt(a).name);
        }
        out
    }
}

/// `k_A` = number of variables of sort `A` plus those of every sort
/// mutually recursive with `A`, at least 1. `var_sorts` lists the sort of
/// each variable of the (flattened, Skolemized) query.
pub fn compute_depths(g: &AdtGraph, var_sorts: impl IntoIterator<Item = Sort>) -> DepthMap {
    let n = g.len();
    let mut counts = alloc::vec![0usize; n];
    for s in var_sorts {
        if let Sort::Adt(a) = s {
            counts[a.index()] += 1;
        }
    }
    let k = (0..n)
        .map(|a| {
            let a = AdtId(a as u32);
            let partners: usize = (0..n)
                .map(|b| AdtId(b as u32))
                .filter(|&b| mutually_recursive(g, a, b))
                .map(|b| counts[b.index()])
                .sum();
            (counts[a.index()] + partners).max(1)
        })
        .collect();
    DepthMap { k }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_script;

    fn sig(text: &str) -> AdtSignature {
        parse_script(text).unwrap().decls.adts
    }

    const BLOCKS: &str = "(declare-datatypes ((block 0) (tower 0) (config 0))
        (((A) (B))
         ((Empty) (Stack (top block) (rest tower)))
         ((table (left tower) (center tower) (right tower)))))";

    const FOREST: &str = "(declare-datatypes ((tree 0) (forest 0))
        (((leaf) (node (kids forest)))
         ((nil) (cons (head tree) (tail forest)))))";

    fn id(sig: &AdtSignature, name: &str) -> AdtId {
        sig.find_adt(name).unwrap()
    }

    #[test]
    fn blocks_world_graph() {
        let s = sig(BLOCKS);
        let g = build_graph(&s);
        let (block, tower, config) = (id(&s, "block"), id(&s, "tower"), id(&s, "config"));
        let edges: Vec<_> = g.edges().collect();
        assert_eq!(edges, [(tower, block), (tower, tower), (config, tower)]);
        assert!(!mutually_recursive(&g, tower, block));
        assert!(!mutually_recursive(&g, tower, config));
        assert!(g.reaches(config, block));
    }

    #[test]
    fn enum_has_no_edges() {
        let s = sig("(declare-datatypes ((block 0)) (((A) (B))))");
        assert_eq!(build_graph(&s).edges().count(), 0);
    }

    #[test]
    fn finite_nesting_has_no_cycles() {
        let s = sig("(declare-datatypes ((enum 0) (rec1 0) (rec2 0))
            (((a) (b))
             ((j (l enum) (r enum)))
             ((k (p rec1) (q rec1)))))");
        let g = build_graph(&s);
        let (e, r1, r2) = (id(&s, "enum"), id(&s, "rec1"), id(&s, "rec2"));
        assert_eq!(g.edges().collect::<Vec<_>>(), [(r1, e), (r2, r1)]);
        assert!(s.adt_ids().all(|a| !g.is_recursive(a)));
    }

    #[test]
    fn tree_and_forest_are_mutually_recursive() {
        let s = sig(FOREST);
        let g = build_graph(&s);
        let (tree, forest) = (id(&s, "tree"), id(&s, "forest"));
        assert!(mutually_recursive(&g, tree, forest));
        assert!(mutually_recursive(&g, forest, tree));
        let sorts = [Sort::Adt(tree); 2].into_iter().chain([Sort::Adt(forest); 3]);
        let d = compute_depths(&g, sorts);
        assert_eq!(d.get(tree), 5);
        assert_eq!(d.get(forest), 5);
    }

    #[test]
    fn depth_counts_own_sort_and_floors_at_one() {
        let s = sig(BLOCKS);
        let g = build_graph(&s);
        let (block, tower, config) = (id(&s, "block"), id(&s, "tower"), id(&s, "config"));
        let d = compute_depths(&g, [Sort::Adt(tower); 4].into_iter().chain([Sort::Adt(block); 2]));
        assert_eq!(d.get(tower), 4);
        assert_eq!(d.get(block), 2);
        assert_eq!(d.get(config), 1);
        let d = compute_depths(&g, [Sort::Adt(block), Sort::Bool]);
        assert_eq!(d.get(block), 1);
        assert_eq!(d.render(&s), "block=1\ntower=1\nconfig=1\n");
    }
}
