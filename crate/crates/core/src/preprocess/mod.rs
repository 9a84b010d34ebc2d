//! `ite` elimination and flattening.
//!
//! After [`flatten`], every theory atom has one of the forms `x = y`,
//! `x = g(x₁, …, xₙ)` or `is-C(x)` over variables, and everything else in
//! the assertions is Boolean structure (`not`, `and`, `or`, `=>`, and `=`
//! between Booleans read as `↔`).

use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::frontend::{Script, RESERVED_PREFIX};
use crate::ir::{CtorId, Node, Op, Sort, TermId, VarId};

/// A theory atom of a flat query.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FlatLiteral {
    /// `x = y` over a non-Boolean sort.
    Eq(VarId, VarId),
    /// `x = g(x₁, …, xₙ)`.
    DefEq(VarId, Op, Vec<VarId>),
    /// `is-C(x)` in Boolean position.
    Tester(CtorId, VarId),
}

impl FlatLiteral {
    /// Recognises a flat atom.
    pub fn classify(script: &Script, t: TermId) -> Option<FlatLiteral> {
        let store = &script.store;
        let var = |t: TermId| match *store.node(t) {
            Node::Var(v) => Some(v),
            _ => None,
        };
        match store.node(t) {
            Node::Eq(a, b) => {
                let x = var(*a)?;
                if let Some(y) = var(*b) {
                    return (store.sort(*a) != Sort::Bool).then_some(FlatLiteral::Eq(x, y));
                }
                let Node::App(op, args) = store.node(*b) else {
                    return None;
                };
                let args = args.iter().map(|&a| var(a)).collect::<Option<Vec<_>>>()?;
                Some(FlatLiteral::DefEq(x, *op, args))
            }
            Node::App(Op::Test(c), args) => Some(FlatLiteral::Tester(*c, var(args[0])?)),
            _ => None,
        }
    }

    pub fn vars(&self) -> Vec<VarId> {
        match self {
            FlatLiteral::Eq(x, y) => alloc::vec![*x, *y],
            FlatLiteral::DefEq(x, _, args) => {
                let mut out = alloc::vec![*x];
                out.extend(args);
                out
            }
            FlatLiteral::Tester(_, x) => alloc::vec![*x],
        }
    }
}

/// A flattened query: a script whose theory atoms are all flat, plus the
/// table of those atoms.
#[derive(Clone, Debug)]
pub struct FlatQuery {
    pub script: Script,
    /// Every flat atom occurring in the assertions, in first-occurrence
    /// order, keyed by its term.
    pub literals: Vec<(TermId, FlatLiteral)>,
    /// Variables naming nested applications.
    pub fresh: Vec<VarId>,
    /// Boolean variables naming compound formulas used as arguments.
    pub bool_names: Vec<VarId>,
}

impl FlatQuery {
    /// Wraps a script that is already flat, building the literal table.
    pub fn from_flat_script(script: Script) -> Self {
        let literals = literal_table(&script);
        FlatQuery {
            script,
            literals,
            fresh: Vec::new(),
            bool_names: Vec::new(),
        }
    }

    /// The flat query as a script.
    pub fn to_script(&self) -> &Script {
        &self.script
    }
}

fn literal_table(script: &Script) -> Vec<(TermId, FlatLiteral)> {
    let store = &script.store;
    let mut seen = alloc::vec![false; store.len()];
    let mut out = Vec::new();
    let mut stack: Vec<TermId> = script.assertions.iter().rev().copied().collect();
    while let Some(t) = stack.pop() {
        if core::mem::replace(&mut seen[t.index()], true) {
            continue;
        }
        if let Some(lit) = FlatLiteral::classify(script, t) {
            out.push((t, lit));
            continue;
        }
        stack.extend(store.children(t).into_iter().rev());
    }
    out
}

/// Replaces every `ite` of non-Boolean sort by a fresh variable `v` with
/// the side assertion `(c → v = a) ∧ (¬c → v = b)`; Boolean `ite` becomes
/// `(c ∧ a) ∨ (¬c ∧ b)`. Scripts without `ite` come back unchanged.
pub fn desugar_ite(script: &Script) -> Script {
    let mut out = script.clone();
    let Script {
        decls,
        store,
        assertions,
        ..
    } = &mut out;
    let prefix = alloc::format!("{RESERVED_PREFIX}ite!");
    let mut side = Vec::new();
    let mut memo = HashMap::new();
    let mut post = |store: &mut crate::ir::TermStore, t: TermId| {
        let Node::Ite(c, a, b) = *store.node(t) else {
            return t;
        };
        if store.sort(t) == Sort::Bool {
            let then = store.mk_and(alloc::vec![c, a]);
            let not_c = store.mk_not(c);
            let els = store.mk_and(alloc::vec![not_c, b]);
            return store.mk_or(alloc::vec![then, els]);
        }
        let v = store.fresh_var(&prefix, store.sort(t));
        let v = store.mk_var(v);
        let eq_a = store.mk_eq(v, a);
        let eq_b = store.mk_eq(v, b);
        let not_c = store.mk_not(c);
        side.push(store.mk_implies(c, eq_a));
        side.push(store.mk_implies(not_c, eq_b));
        v
    };
    for a in assertions.iter_mut() {
        *a = store.rewrite_with(decls, *a, &mut memo, &mut |_, _| None, &mut post);
    }
    assertions.extend(side);
    out
}

struct Flattener<'a> {
    script: &'a mut Script,
    /// Application term → variable naming it.
    named: HashMap<TermId, TermId>,
    /// Formula term → Boolean variable naming it.
    named_bool: HashMap<TermId, TermId>,
    formulas: HashMap<TermId, TermId>,
    defs: Vec<TermId>,
    fresh: Vec<VarId>,
    bool_names: Vec<VarId>,
    flat_prefix: alloc::string::String,
    bool_prefix: alloc::string::String,
}

impl Flattener<'_> {
    fn var(&self, t: TermId) -> Option<VarId> {
        match *self.script.store.node(t) {
            Node::Var(v) => Some(v),
            _ => None,
        }
    }

    fn is_flat_app(&self, t: TermId) -> bool {
        match self.script.store.node(t) {
            Node::App(_, args) => args.iter().all(|&a| self.var(a).is_some()),
            _ => false,
        }
    }

    /// A variable equal to the non-Boolean or application term `t`.
    fn name(&mut self, t: TermId) -> TermId {
        if self.var(t).is_some() {
            return t;
        }
        let store = &self.script.store;
        if let Node::App(op, args) = store.node(t) {
            if let Some(&v) = self.named.get(&t) {
                return v;
            }
            let (op, args) = (*op, args.to_vec());
            let args = args.into_iter().map(|a| self.name(a)).collect();
            let Script { decls, store, .. } = &mut *self.script;
            let app = store.mk_app(decls, op, args);
            let v = store.fresh_var(&self.flat_prefix, store.sort(t));
            self.fresh.push(v);
            let vt = store.mk_var(v);
            self.defs.push(store.mk_eq(vt, app));
            self.named.insert(t, vt);
            return vt;
        }
        debug_assert_eq!(store.sort(t), Sort::Bool, "non-Boolean term that is neither variable nor application");
        if let Some(&v) = self.named_bool.get(&t) {
            return v;
        }
        let f = self.formula(t);
        let store = &mut self.script.store;
        let v = store.fresh_var(&self.bool_prefix, Sort::Bool);
        self.bool_names.push(v);
        let vt = store.mk_var(v);
        self.defs.push(store.mk_iff(vt, f));
        self.named_bool.insert(t, vt);
        vt
    }

    /// The flat version of the Boolean term `t`.
    fn formula(&mut self, t: TermId) -> TermId {
        if let Some(&f) = self.formulas.get(&t) {
            return f;
        }
        let node = self.script.store.node(t).clone();
        let f = match node {
            Node::Bool(_) | Node::Var(_) => t,
            Node::Not(a) => {
                let a = self.formula(a);
                self.script.store.mk_not(a)
            }
            Node::And(args) => {
                let args = args.iter().map(|&a| self.formula(a)).collect();
                self.script.store.mk_and(args)
            }
            Node::Or(args) => {
                let args = args.iter().map(|&a| self.formula(a)).collect();
                self.script.store.mk_or(args)
            }
            Node::Implies(a, b) => {
                let (a, b) = (self.formula(a), self.formula(b));
                self.script.store.mk_implies(a, b)
            }
            Node::Ite(..) => panic!("flatten expects ite-free input"),
            Node::App(Op::Test(c), args) => {
                let x = self.name(args[0]);
                let Script { decls, store, .. } = &mut *self.script;
                store.mk_app(decls, Op::Test(c), alloc::vec![x])
            }
            Node::App(..) => self.name(t),
            Node::Eq(a, b) => self.equation(a, b),
            Node::Distinct(args) => {
                let mut parts = Vec::new();
                for i in 0..args.len() {
                    for j in i + 1..args.len() {
                        let eq = self.equation(args[i], args[j]);
                        parts.push(self.script.store.mk_not(eq));
                    }
                }
                self.script.store.mk_and(parts)
            }
        };
        self.formulas.insert(t, f);
        f
    }

    fn equation(&mut self, a: TermId, b: TermId) -> TermId {
        let (a, b) = match (self.var(a).is_some(), self.var(b).is_some()) {
            (false, true) => (b, a),
            _ => (a, b),
        };
        if self.var(a).is_some() && (self.var(b).is_some() || self.is_flat_app(b)) {
            return self.script.store.mk_eq(a, b);
        }
        if self.script.store.sort(a) == Sort::Bool {
            let (fa, fb) = (self.formula(a), self.formula(b));
            return self.script.store.mk_iff(fa, fb);
        }
        let x = self.name(a);
        let rhs = match self.script.store.node(b) {
            Node::App(op, args) => {
                let (op, args) = (*op, args.to_vec());
                let args = args.into_iter().map(|t| self.name(t)).collect();
                let Script { decls, store, .. } = &mut *self.script;
                store.mk_app(decls, op, args)
            }
            _ => self.name(b),
        };
        self.script.store.mk_eq(x, rhs)
    }
}

/// Flattens an `ite`-free script. Nested applications are named by fresh
/// variables whose defining equations are appended as assertions.
pub fn flatten(script: &Script) -> FlatQuery {
    let mut out = script.clone();
    let app_nodes = out.store.app_count(&out.assertions);
    let mut f = Flattener {
        script: &mut out,
        named: HashMap::new(),
        named_bool: HashMap::new(),
        formulas: HashMap::new(),
        defs: Vec::new(),
        fresh: Vec::new(),
        bool_names: Vec::new(),
        flat_prefix: alloc::format!("{RESERVED_PREFIX}flat!"),
        bool_prefix: alloc::format!("{RESERVED_PREFIX}bool!"),
    };
    let roots = f.script.assertions.clone();
    let mut assertions: Vec<TermId> = roots.iter().map(|&a| f.formula(a)).collect();
    let (defs, fresh, bool_names) = (f.defs, f.fresh, f.bool_names);
    assert!(
        fresh.len() <= app_nodes,
        "flattening introduced {} variables for {app_nodes} applications",
        fresh.len()
    );
    assertions.extend(defs);
    out.assertions = assertions;
    let literals = literal_table(&out);
    FlatQuery {
        script: out,
        literals,
        fresh,
        bool_names,
    }
}

#[cfg(test)]
mod tests;
