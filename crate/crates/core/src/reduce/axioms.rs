//! Tester exclusivity, constants and guarded acyclicality.

use alloc::vec::Vec;

use crate::depth::AdtGraph;
use crate::ir::{AdtId, Declarations, Op, Sort, TermId, TermStore, VarId};

/// Exactly one tester holds for `t`.
pub fn axiom1_exactly_one_tester(store: &mut TermStore, decls: &Declarations, t: VarId) -> TermId {
    let tt = store.mk_var(t);
    let adt = adt_of(store, t);
    let ctors = decls.adts.adt(adt).ctors.clone();
    let testers: Vec<TermId> = ctors
        .iter()
        .map(|&c| store.mk_app(decls, Op::Test(c), alloc::vec![tt]))
        .collect();
    let mut cases = Vec::with_capacity(testers.len());
    for (i, &ti) in testers.iter().enumerate() {
        let mut conj = alloc::vec![ti];
        for (j, &tj) in testers.iter().enumerate() {
            if i != j {
                conj.push(store.mk_not(tj));
            }
        }
        cases.push(store.mk_and(conj));
    }
    store.mk_or(cases)
}

/// `is-c(t) ↔ t = c` for every constant `c` of `t`'s datatype.
pub fn axiom2_constants(store: &mut TermStore, decls: &Declarations, t: VarId) -> Vec<TermId> {
    let tt = store.mk_var(t);
    let adt = adt_of(store, t);
    let constants: Vec<_> = decls.adts.constants(adt).collect();
    constants
        .into_iter()
        .map(|c| {
            let test = store.mk_app(decls, Op::Test(c), alloc::vec![tt]);
            let value = store.mk_app(decls, Op::Ctor(c), Vec::new());
            let eq = store.mk_eq(tt, value);
            store.mk_iff(test, eq)
        })
        .collect()
}

/// Number of axiom-3 instances exceeded the configured cap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CapExceeded;

/// `(is-f₁(t) ∧ … ∧ is-f_l(chain_{l−1})) → chain_l ≠ t` for every selector
/// chain of length `1 ≤ l ≤ k` that returns to `t`'s sort. Chains are
/// walked depth-first in declared selector order; branches that can never
/// return to `t`'s sort are not explored. Appends to `out`, failing once
/// `out` would exceed `cap` entries.
pub fn axiom3_acyclicality(
    store: &mut TermStore,
    decls: &Declarations,
    g: &AdtGraph,
    t: VarId,
    k: usize,
    cap: usize,
    out: &mut Vec<TermId>,
) -> Result<(), CapExceeded> {
    let start = adt_of(store, t);
    if !g.is_recursive(start) || k == 0 {
        return Ok(());
    }
    let tt = store.mk_var(t);
    let mut walk = Walk {
        store,
        decls,
        g,
        root: tt,
        start,
        k,
        cap,
        guards: Vec::new(),
        out,
    };
    walk.go(tt, start, 0)
}

struct Walk<'a> {
    store: &'a mut TermStore,
    decls: &'a Declarations,
    g: &'a AdtGraph,
    root: TermId,
    start: AdtId,
    k: usize,
    cap: usize,
    guards: Vec<TermId>,
    out: &'a mut Vec<TermId>,
}

impl Walk<'_> {
    fn go(&mut self, at: TermId, sort: AdtId, depth: usize) -> Result<(), CapExceeded> {
        let decls = self.decls;
        let sig = &decls.adts;
        for &ctor in &sig.adt(sort).ctors {
            let tester = self.store.mk_app(decls, Op::Test(ctor), alloc::vec![at]);
            for &sel in &sig.ctor(ctor).selectors {
                let Sort::Adt(b) = sig.sel(sel).sort else {
                    continue;
                };
                if !self.g.reaches(b, self.start) && b != self.start {
                    continue;
                }
                let child = self.store.mk_app(decls, Op::Sel(sel), alloc::vec![at]);
                self.guards.push(tester);
                if b == self.start {
                    if self.out.len() >= self.cap {
                        return Err(CapExceeded);
                    }
                    let guard = self.store.mk_and(self.guards.clone());
                    let eq = self.store.mk_eq(child, self.root);
                    let neq = self.store.mk_not(eq);
                    self.out.push(self.store.mk_implies(guard, neq));
                }
                if depth + 1 < self.k {
                    self.go(child, b, depth + 1)?;
                }
                self.guards.pop();
            }
        }
        Ok(())
    }
}

/// The axiom-3 instances of [`axiom3_acyclicality`] for `t`, folded into a
/// single formula that nests each guard under its prefix:
/// `is-f(t) → (chain ≠ t ∧ …deeper guards…)`. Each instance is written
/// once, so the result is linear in the number of chains. Adds the number
/// of instances to `count`, failing once it would exceed `cap`.
pub fn axiom3_nested(
    store: &mut TermStore,
    decls: &Declarations,
    g: &AdtGraph,
    t: VarId,
    k: usize,
    cap: usize,
    count: &mut usize,
) -> Result<Option<TermId>, CapExceeded> {
    let start = adt_of(store, t);
    if !g.is_recursive(start) || k == 0 {
        return Ok(None);
    }
    let root = store.mk_var(t);
    let mut nest = Nest {
        store,
        decls,
        g,
        root,
        start,
        k,
        cap,
        count,
    };
    let parts = nest.go(root, start, 0)?;
    Ok((!parts.is_empty()).then(|| nest.store.mk_and(parts)))
}

struct Nest<'a> {
    store: &'a mut TermStore,
    decls: &'a Declarations,
    g: &'a AdtGraph,
    root: TermId,
    start: AdtId,
    k: usize,
    cap: usize,
    count: &'a mut usize,
}

impl Nest<'_> {
    fn go(&mut self, at: TermId, sort: AdtId, depth: usize) -> Result<Vec<TermId>, CapExceeded> {
        let decls = self.decls;
        let sig = &decls.adts;
        let mut parts = Vec::new();
        for &ctor in &sig.adt(sort).ctors {
            let mut body = Vec::new();
            for &sel in &sig.ctor(ctor).selectors {
                let Sort::Adt(b) = sig.sel(sel).sort else {
                    continue;
                };
                if !self.g.reaches(b, self.start) && b != self.start {
                    continue;
                }
                let child = self.store.mk_app(decls, Op::Sel(sel), alloc::vec![at]);
                if b == self.start {
                    if *self.count >= self.cap {
                        return Err(CapExceeded);
                    }
                    *self.count += 1;
                    let eq = self.store.mk_eq(child, self.root);
                    body.push(self.store.mk_not(eq));
                }
                if depth + 1 < self.k {
                    body.extend(self.go(child, b, depth + 1)?);
                }
            }
            if !body.is_empty() {
                let tester = self.store.mk_app(decls, Op::Test(ctor), alloc::vec![at]);
                let body = self.store.mk_and(body);
                parts.push(self.store.mk_implies(tester, body));
            }
        }
        Ok(parts)
    }
}

fn adt_of(store: &TermStore, t: VarId) -> AdtId {
    store
        .var_decl(t)
        .sort
        .adt()
        .expect("axioms are instantiated for datatype variables only")
}
