use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use super::{AdtSignature, CtorId, Declarations, Op, Sort, TermId, TermStore};

/// A constructor-only value of a datatype. Boolean leaves stand for
/// `Bool`-sorted constructor fields.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum NormalTerm {
    Bool(bool),
    App(CtorId, Vec<NormalTerm>),
}

impl NormalTerm {
    /// Constants and Boolean leaves have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            NormalTerm::Bool(_) => 0,
            NormalTerm::App(_, args) => args.iter().map(|a| a.depth() + 1).max().unwrap_or(0),
        }
    }

    pub fn ctor(&self) -> Option<CtorId> {
        match self {
            NormalTerm::App(c, _) => Some(*c),
            NormalTerm::Bool(_) => None,
        }
    }

    pub fn args(&self) -> &[NormalTerm] {
        match self {
            NormalTerm::App(_, args) => args,
            NormalTerm::Bool(_) => &[],
        }
    }

    /// Builds the corresponding constructor term.
    pub fn to_term(&self, store: &mut TermStore, decls: &Declarations) -> TermId {
        match self {
            NormalTerm::Bool(b) => store.mk_bool(*b),
            NormalTerm::App(c, args) => {
                let args = args.iter().map(|a| a.to_term(store, decls)).collect();
                store.mk_app(decls, Op::Ctor(*c), args)
            }
        }
    }

    /// SMT-LIB rendering, e.g. `(Stack A Empty)`.
    pub fn render(&self, sig: &AdtSignature) -> String {
        let mut out = String::new();
        self.render_into(sig, &mut out);
        out
    }

    fn render_into(&self, sig: &AdtSignature, out: &mut String) {
        match self {
            NormalTerm::Bool(b) => {
                let _ = write!(out, "{b}");
            }
            NormalTerm::App(c, args) if args.is_empty() => out.push_str(&sig.ctor(*c).name),
            NormalTerm::App(c, args) => {
                out.push('(');
                out.push_str(&sig.ctor(*c).name);
                for a in args {
                    out.push(' ');
                    a.render_into(sig, out);
                }
                out.push(')');
            }
        }
    }
}

/// A selector chain `f_l(…f_1(x)…)` with the tester guards
/// `is-f_1(x), …, is-f_l(f_{l-1}(…))` under which it is well applied.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectorChain {
    pub term: TermId,
    pub guards: Vec<TermId>,
    pub sort: Sort,
}

/// All well-sorted selector chains of length exactly `len` below `x`,
/// depth-first in declared selector order. Empty when `x` is not
/// datatype-sorted or no chain of that length exists.
pub fn child_depth_terms(
    store: &mut TermStore,
    decls: &Declarations,
    x: TermId,
    len: usize,
) -> Vec<SelectorChain> {
    let mut out = Vec::new();
    let mut guards = Vec::new();
    extend_chains(store, decls, x, len, &mut guards, &mut out);
    out
}

fn extend_chains(
    store: &mut TermStore,
    decls: &Declarations,
    at: TermId,
    remaining: usize,
    guards: &mut Vec<TermId>,
    out: &mut Vec<SelectorChain>,
) {
    let Sort::Adt(adt) = store.sort(at) else {
        return;
    };
    let sig = &decls.adts;
    for &ctor in &sig.adt(adt).ctors {
        let tester = store.mk_app(decls, Op::Test(ctor), alloc::vec![at]);
        for &sel in &sig.ctor(ctor).selectors {
            let child = store.mk_app(decls, Op::Sel(sel), alloc::vec![at]);
            guards.push(tester);
            if remaining == 1 {
                out.push(SelectorChain {
                    term: child,
                    guards: guards.clone(),
                    sort: sig.sel(sel).sort,
                });
            } else {
                extend_chains(store, decls, child, remaining - 1, guards, out);
            }
            guards.pop();
        }
    }
}
