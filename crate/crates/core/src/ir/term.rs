use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::{CtorId, Declarations, FunId, SelId, Sort, TermId, VarId};

/// Function symbols that take arguments.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Op {
    Ctor(CtorId),
    Sel(SelId),
    /// The tester of a constructor.
    Test(CtorId),
    Fun(FunId),
}

impl Op {
    pub fn result_sort(self, decls: &Declarations) -> Sort {
        match self {
            Op::Ctor(c) => Sort::Adt(decls.adts.ctor(c).adt),
            Op::Sel(s) => decls.adts.sel(s).sort,
            Op::Test(_) => Sort::Bool,
            Op::Fun(f) => decls.fun(f).ret,
        }
    }

    pub fn param_sorts(self, decls: &Declarations) -> Vec<Sort> {
        match self {
            Op::Ctor(c) => decls.adts.ctor_fields(c).collect(),
            Op::Sel(s) => {
                let ctor = decls.adts.sel(s).ctor;
                alloc::vec![Sort::Adt(decls.adts.ctor(ctor).adt)]
            }
            Op::Test(c) => alloc::vec![Sort::Adt(decls.adts.ctor(c).adt)],
            Op::Fun(f) => decls.fun(f).params.clone(),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub enum Node {
    Bool(bool),
    Var(VarId),
    App(Op, Box<[TermId]>),
    Eq(TermId, TermId),
    Distinct(Box<[TermId]>),
    Not(TermId),
    And(Box<[TermId]>),
    Or(Box<[TermId]>),
    Implies(TermId, TermId),
    Ite(TermId, TermId, TermId),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub sort: Sort,
    /// Placeholder that never appears in printed output (macro parameters).
    pub internal: bool,
}

/// Interning table for terms and variables.
///
/// Structurally equal terms always receive the same [`TermId`], so term
/// equality is id equality. Ids are handed out sequentially, which makes
/// every traversal over a store deterministic.
#[derive(Clone, Debug, Default)]
pub struct TermStore {
    nodes: Vec<Node>,
    sorts: Vec<Sort>,
    index: HashMap<Node, TermId>,
    vars: Vec<VarDecl>,
    var_names: HashMap<String, VarId>,
    fresh_counter: usize,
}

impl TermStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, t: TermId) -> &Node {
        &self.nodes[t.index()]
    }

    pub fn sort(&self, t: TermId) -> Sort {
        self.sorts[t.index()]
    }

    pub fn var_decl(&self, v: VarId) -> &VarDecl {
        &self.vars[v.index()]
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_ids(&self) -> impl ExactSizeIterator<Item = VarId> {
        (0..self.vars.len()).map(VarId::from_index)
    }

    pub fn find_var(&self, name: &str) -> Option<VarId> {
        self.var_names.get(name).copied()
    }

    /// Declares a named variable. Returns `None` if the name is taken.
    pub fn declare_var(&mut self, name: String, sort: Sort) -> Option<VarId> {
        if self.var_names.contains_key(&name) {
            return None;
        }
        let id = VarId::from_index(self.vars.len());
        self.var_names.insert(name.clone(), id);
        self.vars.push(VarDecl {
            name,
            sort,
            internal: false,
        });
        Some(id)
    }

    /// A fresh variable flagged as internal.
    pub fn placeholder_var(&mut self, prefix: &str, sort: Sort) -> VarId {
        let v = self.fresh_var(prefix, sort);
        self.vars[v.index()].internal = true;
        v
    }

    /// Declares a variable named `prefix` followed by a counter value that
    /// is not yet in use.
    pub fn fresh_var(&mut self, prefix: &str, sort: Sort) -> VarId {
        loop {
            let name = format!("{prefix}{}", self.fresh_counter);
            self.fresh_counter += 1;
            if let Some(v) = self.declare_var(name, sort) {
                return v;
            }
        }
    }

    fn intern(&mut self, node: Node, sort: Sort) -> TermId {
        if let Some(&id) = self.index.get(&node) {
            return id;
        }
        let id = TermId::from_index(self.nodes.len());
        self.nodes.push(node.clone());
        self.sorts.push(sort);
        self.index.insert(node, id);
        id
    }

    pub fn mk_bool(&mut self, value: bool) -> TermId {
        self.intern(Node::Bool(value), Sort::Bool)
    }

    pub fn mk_var(&mut self, v: VarId) -> TermId {
        let sort = self.vars[v.index()].sort;
        self.intern(Node::Var(v), sort)
    }

    /// Applies `op`. Argument sorts are the caller's responsibility; they
    /// are checked in debug builds.
    pub fn mk_app(&mut self, decls: &Declarations, op: Op, args: Vec<TermId>) -> TermId {
        debug_assert_eq!(
            op.param_sorts(decls),
            args.iter().map(|&a| self.sort(a)).collect::<Vec<_>>(),
            "ill-sorted application of {op:?}"
        );
        let sort = op.result_sort(decls);
        self.intern(Node::App(op, args.into_boxed_slice()), sort)
    }

    pub fn mk_eq(&mut self, lhs: TermId, rhs: TermId) -> TermId {
        debug_assert_eq!(self.sort(lhs), self.sort(rhs));
        self.intern(Node::Eq(lhs, rhs), Sort::Bool)
    }

    pub fn mk_distinct(&mut self, args: Vec<TermId>) -> TermId {
        if args.len() < 2 {
            return self.mk_bool(true);
        }
        self.intern(Node::Distinct(args.into_boxed_slice()), Sort::Bool)
    }

    pub fn mk_not(&mut self, t: TermId) -> TermId {
        match *self.node(t) {
            Node::Bool(b) => self.mk_bool(!b),
            _ => self.intern(Node::Not(t), Sort::Bool),
        }
    }

    pub fn mk_and(&mut self, args: Vec<TermId>) -> TermId {
        self.mk_junction(args, true)
    }

    pub fn mk_or(&mut self, args: Vec<TermId>) -> TermId {
        self.mk_junction(args, false)
    }

    fn mk_junction(&mut self, args: Vec<TermId>, is_and: bool) -> TermId {
        let mut kept = Vec::with_capacity(args.len());
        for a in args {
            match *self.node(a) {
                // The neutral element drops out; the absorbing one wins.
                Node::Bool(b) if b == is_and => {}
                Node::Bool(_) => return self.mk_bool(!is_and),
                _ => kept.push(a),
            }
        }
        match kept.len() {
            0 => self.mk_bool(is_and),
            1 => kept[0],
            _ => {
                let node = if is_and {
                    Node::And(kept.into_boxed_slice())
                } else {
                    Node::Or(kept.into_boxed_slice())
                };
                self.intern(node, Sort::Bool)
            }
        }
    }

    pub fn mk_implies(&mut self, lhs: TermId, rhs: TermId) -> TermId {
        self.intern(Node::Implies(lhs, rhs), Sort::Bool)
    }

    pub fn mk_iff(&mut self, lhs: TermId, rhs: TermId) -> TermId {
        self.mk_eq(lhs, rhs)
    }

    pub fn mk_ite(&mut self, cond: TermId, then: TermId, els: TermId) -> TermId {
        debug_assert_eq!(self.sort(then), self.sort(els));
        let sort = self.sort(then);
        self.intern(Node::Ite(cond, then, els), sort)
    }

    /// Direct children of a term, in order.
    pub fn children(&self, t: TermId) -> Vec<TermId> {
        match self.node(t) {
            Node::Bool(_) | Node::Var(_) => Vec::new(),
            Node::App(_, args) | Node::Distinct(args) | Node::And(args) | Node::Or(args) => {
                args.to_vec()
            }
            Node::Eq(a, b) | Node::Implies(a, b) => alloc::vec![*a, *b],
            Node::Not(a) => alloc::vec![*a],
            Node::Ite(c, a, b) => alloc::vec![*c, *a, *b],
        }
    }

    /// Rebuilds `root` bottom-up. `replace` is offered every subterm first;
    /// when it returns `Some`, that term is used as-is and its children are
    /// not visited. Results are cached in `memo`, so shared subterms are
    /// rewritten once. Iterative, so term depth is not limited by the stack.
    pub fn rewrite(
        &mut self,
        decls: &Declarations,
        root: TermId,
        memo: &mut HashMap<TermId, TermId>,
        replace: &mut dyn FnMut(&mut TermStore, TermId) -> Option<TermId>,
    ) -> TermId {
        self.rewrite_with(decls, root, memo, replace, &mut |_, t| t)
    }

    /// As [`TermStore::rewrite`], additionally passing every rebuilt term
    /// through `post` before it is cached.
    pub fn rewrite_with(
        &mut self,
        decls: &Declarations,
        root: TermId,
        memo: &mut HashMap<TermId, TermId>,
        replace: &mut dyn FnMut(&mut TermStore, TermId) -> Option<TermId>,
        post: &mut dyn FnMut(&mut TermStore, TermId) -> TermId,
    ) -> TermId {
        let mut stack = alloc::vec![(root, false)];
        while let Some((t, ready)) = stack.pop() {
            if memo.contains_key(&t) {
                continue;
            }
            if !ready {
                if let Some(r) = replace(self, t) {
                    memo.insert(t, r);
                    continue;
                }
                stack.push((t, true));
                stack.extend(self.children(t).into_iter().map(|c| (c, false)));
                continue;
            }
            let node = self.node(t).clone();
            let m = |c: &TermId| memo[c];
            let rebuilt = match node {
                Node::Bool(_) | Node::Var(_) => t,
                Node::App(op, args) => {
                    let args = args.iter().map(m).collect();
                    self.mk_app(decls, op, args)
                }
                Node::Eq(a, b) => {
                    let (a, b) = (m(&a), m(&b));
                    self.mk_eq(a, b)
                }
                Node::Distinct(args) => {
                    let args = args.iter().map(m).collect();
                    self.mk_distinct(args)
                }
                Node::Not(a) => {
                    let a = m(&a);
                    self.mk_not(a)
                }
                Node::And(args) => {
                    let args = args.iter().map(m).collect();
                    self.mk_and(args)
                }
                Node::Or(args) => {
                    let args = args.iter().map(m).collect();
                    self.mk_or(args)
                }
                Node::Implies(a, b) => {
                    let (a, b) = (m(&a), m(&b));
                    self.mk_implies(a, b)
                }
                Node::Ite(c, a, b) => {
                    let (c, a, b) = (m(&c), m(&a), m(&b));
                    self.mk_ite(c, a, b)
                }
            };
            let rebuilt = post(self, rebuilt);
            memo.insert(t, rebuilt);
        }
        memo[&root]
    }

    /// Variables occurring in the given roots, in first-occurrence order.
    pub fn free_vars(&self, roots: &[TermId]) -> Vec<VarId> {
        let mut seen_terms = alloc::vec![false; self.nodes.len()];
        let mut seen_vars = alloc::vec![false; self.vars.len()];
        let mut out = Vec::new();
        let mut stack: Vec<TermId> = roots.iter().rev().copied().collect();
        while let Some(t) = stack.pop() {
            if core::mem::replace(&mut seen_terms[t.index()], true) {
                continue;
            }
            if let Node::Var(v) = *self.node(t) {
                if !core::mem::replace(&mut seen_vars[v.index()], true) {
                    out.push(v);
                }
            }
            stack.extend(self.children(t).into_iter().rev());
        }
        out
    }

    /// Number of application nodes (constructor, selector, tester and
    /// function applications) reachable from the roots, counting shared
    /// subterms once.
    pub fn app_count(&self, roots: &[TermId]) -> usize {
        let mut seen = alloc::vec![false; self.nodes.len()];
        let mut count = 0;
        let mut stack: Vec<TermId> = roots.to_vec();
        while let Some(t) = stack.pop() {
            if core::mem::replace(&mut seen[t.index()], true) {
                continue;
            }
            if matches!(self.node(t), Node::App(..)) {
                count += 1;
            }
            stack.extend(self.children(t));
        }
        count
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_structure_same_id() {
        let mut store = TermStore::new();
        let x = store.declare_var("x".into(), Sort::Bool).unwrap();
        let y = store.declare_var("y".into(), Sort::Bool).unwrap();
        let (tx, ty) = (store.mk_var(x), store.mk_var(y));
        let a = store.mk_and(alloc::vec![tx, ty]);
        let b = store.mk_and(alloc::vec![tx, ty]);
        assert_eq!(a, b);
        let before = store.len();
        let c = store.mk_or(alloc::vec![tx, ty]);
        assert_ne!(a, c);
        assert_eq!(store.len(), before + 1);
    }

    #[test]
    fn boolean_constants_fold() {
        let mut store = TermStore::new();
        let x = store.declare_var("x".into(), Sort::Bool).unwrap();
        let tx = store.mk_var(x);
        let t = store.mk_bool(true);
        let f = store.mk_bool(false);
        assert_eq!(store.mk_and(alloc::vec![t, tx]), tx);
        assert_eq!(store.mk_and(alloc::vec![f, tx]), f);
        assert_eq!(store.mk_or(alloc::vec![t, tx]), t);
        assert_eq!(store.mk_and(alloc::vec![]), t);
        assert_eq!(store.mk_not(t), f);
    }

    #[test]
    fn fresh_vars_skip_taken_names() {
        let mut store = TermStore::new();
        store.declare_var("v0".into(), Sort::Bool).unwrap();
        let v = store.fresh_var("v", Sort::Bool);
        assert_eq!(store.var_decl(v).name, "v1");
        assert!(store.declare_var("v1".into(), Sort::Bool).is_none());
    }
}
