//! Bounded model search over constructor terms.
//!
//! [`oracle_solve`] enumerates assignments of every datatype variable of a
//! flat query to constructor terms of depth at most the bound, every
//! Boolean variable to a truth value, and every selector applied outside
//! its constructor to an unconstrained value, and evaluates the assertions.
//! A model found at any bound is a model. Exhausting the search is reported
//! as unsatisfiable only once the bound reaches [`promotion_bound`].

use alloc::format;
use alloc::rc::Rc;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use crate::depth::build_graph;
use crate::frontend::Script;
use crate::ir::{AdtId, CtorId, NormalTerm, Node, Op, SelId, Sort, TermId, VarId};
use crate::preprocess::{FlatLiteral, FlatQuery};
use crate::reduce::{skolemized_depths, universe_info};
use crate::Answer;

/// Limits on the work done by one search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleOptions {
    /// Search nodes visited before giving up.
    pub node_budget: u64,
    /// Distinct values materialised before giving up.
    pub value_budget: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        OracleOptions {
            node_budget: 2_000_000,
            value_budget: 200_000,
        }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    /// The query lies outside the fragment the search handles.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// The value chosen for `sel(arg)` when `arg` is not built by `sel`'s
/// constructor. `None` is a value different from every variable compared
/// with it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotChoice {
    pub sel: SelId,
    pub arg: NormalTerm,
    pub value: Option<NormalTerm>,
}

/// A satisfying assignment.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Witness {
    pub vars: Vec<(VarId, NormalTerm)>,
    pub slots: Vec<SlotChoice>,
}

impl Witness {
    pub fn max_depth(&self) -> usize {
        self.vars.iter().map(|(_, v)| v.depth()).max().unwrap_or(0)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub answer: Answer,
    pub bound: usize,
    pub witness: Option<Witness>,
    pub nodes: u64,
}

/// The largest depth bound a query needs: the largest variable-count bound
/// of its Skolemized depth map plus its constructor nesting depth.
pub fn promotion_bound(q: &FlatQuery) -> usize {
    skolemized_depths(q).max() + nesting_depth(q)
}

/// Length of the longest chain `x₀ = f(…x₁…)`, `x₁ = g(…x₂…)`, … of
/// constructor literals.
pub fn nesting_depth(q: &FlatQuery) -> usize {
    let defs: Vec<(VarId, &[VarId])> = q
        .literals
        .iter()
        .filter_map(|(_, lit)| match lit {
            FlatLiteral::DefEq(x, Op::Ctor(_), args) => Some((*x, args.as_slice())),
            _ => None,
        })
        .collect();
    let mut depth: HashMap<VarId, usize> = HashMap::new();
    for _ in 0..=defs.len() {
        let mut changed = false;
        for &(x, args) in &defs {
            if args.is_empty() {
                continue;
            }
            let d = 1 + args.iter().map(|a| depth.get(a).copied().unwrap_or(0)).max().unwrap_or(0);
            let d = d.min(defs.len());
            let e = depth.entry(x).or_insert(0);
            if d > *e {
                *e = d;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    depth.values().copied().max().unwrap_or(0)
}

/// Searches at the bound [`promotion_bound`], so that exhausting the search
/// proves unsatisfiability.
pub fn oracle_decide(q: &FlatQuery, opts: &OracleOptions) -> Result<OracleResult, OracleError> {
    oracle_solve(q, promotion_bound(q), opts)
}

/// Searches for a model whose datatype variables have depth at most
/// `bound`.
pub fn oracle_solve(q: &FlatQuery, bound: usize, opts: &OracleOptions) -> Result<OracleResult, OracleError> {
    let mut search = Search::new(q, bound, opts)?;
    // Models usually sit at small depths; deepen gradually.
    let mut outcome = Ok(false);
    for d in 0..=bound {
        search.bound = d;
        outcome = search.run();
        if !matches!(outcome, Ok(false)) {
            break;
        }
    }
    let answer = match outcome {
        Ok(true) => Answer::Sat,
        Ok(false) if bound >= promotion_bound(q) => Answer::Unsat,
        Ok(false) => Answer::Unknown("bound".into()),
        Err(Budget) => Answer::Unknown("budget".into()),
    };
    Ok(OracleResult {
        answer,
        bound,
        witness: search.witness.take(),
        nodes: search.nodes,
    })
}

/// Evaluates the query under a witness.
pub fn check_witness(q: &FlatQuery, w: &Witness) -> Result<bool, OracleError> {
    let mut search = Search::new(q, usize::MAX, &OracleOptions::default())?;
    for (v, value) in &w.vars {
        let Some(&i) = search.var_index.get(v) else {
            continue;
        };
        let val = search.values.intern(value);
        search.assign[i] = Some(val);
    }
    if search.assign.iter().any(Option::is_none) {
        return Ok(false);
    }
    let mut slots: HashMap<(SelId, Val), Option<Val>> = HashMap::new();
    for s in &w.slots {
        let arg = search.values.intern(&s.arg);
        let value = s.value.as_ref().map(|v| search.values.intern(v));
        slots.insert((s.sel, arg), value);
    }
    let mut over = alloc::vec![None; search.lits.len()];
    for (i, lit) in search.lits.iter().enumerate() {
        if let Lit::Sel(x, s, t) = *lit {
            let tv = search.assign[t].expect("assigned");
            if search.values.child(tv, &search.q.script, s).is_none() {
                let Some(&choice) = slots.get(&(s, tv)) else {
                    return Ok(false);
                };
                over[i] = Some(choice == search.assign[x]);
            }
        }
    }
    Ok(search.eval_skeleton(&over) == Tri::True)
}

struct Budget;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
enum Val {
    Bool(bool),
    Adt(u32),
}

/// Hash-consed constructor values.
#[derive(Default)]
struct Values {
    nodes: Vec<(CtorId, Rc<[Val]>)>,
    depth: Vec<usize>,
    index: HashMap<(CtorId, Rc<[Val]>), u32>,
}

impl Values {
    fn mk(&mut self, c: CtorId, args: Rc<[Val]>) -> Val {
        if let Some(&id) = self.index.get(&(c, args.clone())) {
            return Val::Adt(id);
        }
        let depth = args
            .iter()
            .map(|a| match a {
                Val::Bool(_) => 1,
                Val::Adt(id) => self.depth[*id as usize] + 1,
            })
            .max()
            .unwrap_or(0);
        let id = self.nodes.len() as u32;
        self.nodes.push((c, args.clone()));
        self.depth.push(depth);
        self.index.insert((c, args), id);
        Val::Adt(id)
    }

    fn depth(&self, v: Val) -> usize {
        match v {
            Val::Bool(_) => 0,
            Val::Adt(id) => self.depth[id as usize],
        }
    }

    fn head(&self, v: Val) -> Option<CtorId> {
        match v {
            Val::Bool(_) => None,
            Val::Adt(id) => Some(self.nodes[id as usize].0),
        }
    }

    fn args(&self, v: Val) -> &[Val] {
        match v {
            Val::Bool(_) => &[],
            Val::Adt(id) => &self.nodes[id as usize].1,
        }
    }

    /// `sel(v)` when `v` is built by `sel`'s constructor.
    fn child(&self, v: Val, script: &Script, sel: SelId) -> Option<Val> {
        let def = script.decls.adts.sel(sel);
        (self.head(v) == Some(def.ctor)).then(|| self.args(v)[def.index])
    }

    fn intern(&mut self, t: &NormalTerm) -> Val {
        match t {
            NormalTerm::Bool(b) => Val::Bool(*b),
            NormalTerm::App(c, args) => {
                let args: Rc<[Val]> = args.iter().map(|a| self.intern(a)).collect();
                self.mk(*c, args)
            }
        }
    }

    fn normal(&self, v: Val) -> NormalTerm {
        match v {
            Val::Bool(b) => NormalTerm::Bool(b),
            Val::Adt(id) => {
                let (c, args) = &self.nodes[id as usize];
                NormalTerm::App(*c, args.iter().map(|&a| self.normal(a)).collect())
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Tri {
    False,
    True,
    Unknown,
}

impl From<bool> for Tri {
    fn from(b: bool) -> Tri {
        if b {
            Tri::True
        } else {
            Tri::False
        }
    }
}

/// A flat literal over search-variable indices.
#[derive(Clone, Debug)]
enum Lit {
    Eq(usize, usize),
    Ctor(usize, CtorId, Vec<usize>),
    Sel(usize, SelId, usize),
    Test(usize, CtorId, usize),
    Tester(CtorId, usize),
}

/// Boolean structure over literals, children before parents.
enum Skel {
    Const(bool),
    Lit(usize),
    Var(usize),
    Not(usize),
    And(Vec<usize>),
    Or(Vec<usize>),
    Implies(usize, usize),
    Iff(usize, usize),
}

/// A fact every model satisfies, used to force values.
#[derive(Clone, Copy)]
enum Fact {
    Lit(usize),
    Bool(usize, bool),
}

struct Search<'a> {
    q: &'a FlatQuery,
    bound: usize,
    opts: OracleOptions,
    vars: Vec<VarId>,
    var_index: HashMap<VarId, usize>,
    sorts: Vec<Sort>,
    /// Constructors a variable may take, from top-level testers.
    allowed: Vec<Option<Vec<bool>>>,
    lits: Vec<Lit>,
    skel: Vec<Skel>,
    roots: Vec<usize>,
    facts: Vec<Fact>,
    finite_size: Vec<Option<usize>>,
    values: Values,
    domains: HashMap<(AdtId, usize), Rc<[Val]>>,
    var_domains: Vec<Option<Rc<[Val]>>>,
    var_sizes: Vec<usize>,
    counts: HashMap<(AdtId, usize), usize>,
    assign: Vec<Option<Val>>,
    trail: Vec<usize>,
    nodes: u64,
    witness: Option<Witness>,
}

impl<'a> Search<'a> {
    fn new(q: &'a FlatQuery, bound: usize, opts: &OracleOptions) -> Result<Self, OracleError> {
        let script = &q.script;
        if !script.decls.funs.is_empty() {
            return Err(OracleError::Unsupported("uninterpreted functions".into()));
        }
        if !script.decls.sorts.is_empty() {
            return Err(OracleError::Unsupported("uninterpreted sorts".into()));
        }
        let g = build_graph(&script.decls.adts);
        let info = universe_info(&script.decls.adts, &g, 0);
        let mut s = Search {
            q,
            bound,
            opts: *opts,
            vars: Vec::new(),
            var_index: HashMap::new(),
            sorts: Vec::new(),
            allowed: Vec::new(),
            lits: Vec::new(),
            skel: Vec::new(),
            roots: Vec::new(),
            facts: Vec::new(),
            finite_size: info.adts.iter().map(|u| u.size).collect(),
            values: Values::default(),
            domains: HashMap::new(),
            var_domains: Vec::new(),
            var_sizes: Vec::new(),
            counts: HashMap::new(),
            assign: Vec::new(),
            trail: Vec::new(),
            nodes: 0,
            witness: None,
        };
        s.compile()?;
        s.assign = alloc::vec![None; s.vars.len()];
        Ok(s)
    }

    fn var(&mut self, v: VarId) -> usize {
        if let Some(&i) = self.var_index.get(&v) {
            return i;
        }
        let i = self.vars.len();
        self.vars.push(v);
        self.var_index.insert(v, i);
        self.sorts.push(self.q.script.store.var_decl(v).sort);
        self.allowed.push(None);
        i
    }

    fn compile(&mut self) -> Result<(), OracleError> {
        let q = self.q;
        let store = &q.script.store;
        let lit_of: HashMap<TermId, &FlatLiteral> = q.literals.iter().map(|(t, l)| (*t, l)).collect();
        let mut lit_index: HashMap<TermId, usize> = HashMap::new();
        let mut memo: HashMap<TermId, usize> = HashMap::new();
        for &root in &q.script.assertions {
            let mut stack = alloc::vec![(root, false)];
            while let Some((t, ready)) = stack.pop() {
                if memo.contains_key(&t) {
                    continue;
                }
                if let Some(lit) = lit_of.get(&t) {
                    let i = self.compile_lit(lit)?;
                    lit_index.insert(t, i);
                    memo.insert(t, self.skel.len());
                    self.skel.push(Skel::Lit(i));
                    continue;
                }
                if !ready {
                    stack.push((t, true));
                    match store.node(t) {
                        Node::Not(_) | Node::And(_) | Node::Or(_) | Node::Implies(..) | Node::Eq(..) => {
                            stack.extend(store.children(t).into_iter().map(|c| (c, false)));
                        }
                        _ => {}
                    }
                    continue;
                }
                let m = |c: &TermId| memo[c];
                let node = match store.node(t) {
                    Node::Bool(b) => Skel::Const(*b),
                    Node::Var(v) if store.var_decl(*v).sort == Sort::Bool => Skel::Var(self.var(*v)),
                    Node::Not(a) => Skel::Not(m(a)),
                    Node::And(args) => Skel::And(args.iter().map(m).collect()),
                    Node::Or(args) => Skel::Or(args.iter().map(m).collect()),
                    Node::Implies(a, b) => Skel::Implies(m(a), m(b)),
                    Node::Eq(a, b) if store.sort(*a) == Sort::Bool => Skel::Iff(m(a), m(b)),
                    _ => return Err(OracleError::Unsupported("terms that are not flat".into())),
                };
                memo.insert(t, self.skel.len());
                self.skel.push(node);
            }
            self.roots.push(memo[&root]);
        }
        let mut top: Vec<(TermId, bool)> = q.script.assertions.iter().map(|&t| (t, true)).collect();
        while let Some((t, positive)) = top.pop() {
            if let Some(&i) = lit_index.get(&t) {
                if positive {
                    self.facts.push(Fact::Lit(i));
                }
                if let Lit::Tester(c, x) = self.lits[i] {
                    self.restrict(x, |head| (head == c) == positive);
                }
                continue;
            }
            match (store.node(t), positive) {
                (Node::And(args), true) | (Node::Or(args), false) => {
                    top.extend(args.iter().map(|&a| (a, positive)));
                }
                (Node::Implies(a, b), false) => top.extend([(*a, true), (*b, false)]),
                (Node::Not(a), _) => top.push((*a, !positive)),
                (Node::Var(v), _) => self.facts.push(Fact::Bool(self.var_index[v], positive)),
                _ => {}
            }
        }
        Ok(())
    }

    fn restrict(&mut self, x: usize, keep: impl Fn(CtorId) -> bool) {
        let n = self.q.script.decls.adts.ctor_ids().len();
        let allowed = self.allowed[x].get_or_insert_with(|| alloc::vec![true; n]);
        for (i, a) in allowed.iter_mut().enumerate() {
            *a &= keep(CtorId(i as u32));
        }
    }

    fn compile_lit(&mut self, lit: &FlatLiteral) -> Result<usize, OracleError> {
        let lit = match lit {
            FlatLiteral::Eq(x, y) => Lit::Eq(self.var(*x), self.var(*y)),
            FlatLiteral::DefEq(x, Op::Ctor(c), args) => {
                let x = self.var(*x);
                Lit::Ctor(x, *c, args.iter().map(|&a| self.var(a)).collect())
            }
            FlatLiteral::DefEq(x, Op::Sel(s), args) => Lit::Sel(self.var(*x), *s, self.var(args[0])),
            FlatLiteral::DefEq(x, Op::Test(c), args) => Lit::Test(self.var(*x), *c, self.var(args[0])),
            FlatLiteral::DefEq(_, Op::Fun(_), _) => {
                return Err(OracleError::Unsupported("uninterpreted functions".into()))
            }
            FlatLiteral::Tester(c, x) => Lit::Tester(*c, self.var(*x)),
        };
        self.lits.push(lit);
        Ok(self.lits.len() - 1)
    }

    /// Number of values of `adt` with depth at most `bound`, saturating.
    fn count(&mut self, adt: AdtId, bound: usize) -> usize {
        if let Some(&n) = self.counts.get(&(adt, bound)) {
            return n;
        }
        let ctors = self.q.script.decls.adts.adt(adt).ctors.clone();
        let n = ctors
            .into_iter()
            .map(|c| self.head_count(c, bound))
            .fold(0usize, usize::saturating_add);
        self.counts.insert((adt, bound), n);
        n
    }

    fn head_count(&mut self, c: CtorId, bound: usize) -> usize {
        let fields: Vec<Sort> = self.q.script.decls.adts.ctor_fields(c).collect();
        if fields.is_empty() {
            return 1;
        }
        if bound == 0 {
            return 0;
        }
        fields
            .into_iter()
            .map(|f| match f {
                Sort::Bool => 2,
                Sort::Adt(b) => self.count(b, bound - 1),
                Sort::Uninterpreted(_) => unreachable!("no uninterpreted sorts"),
            })
            .fold(1usize, usize::saturating_mul)
    }

    /// Values of `adt` with depth at most `bound`, shallowest first.
    fn domain(&mut self, adt: AdtId, bound: usize) -> Result<Rc<[Val]>, Budget> {
        if let Some(d) = self.domains.get(&(adt, bound)) {
            return Ok(d.clone());
        }
        let ctors = self.q.script.decls.adts.adt(adt).ctors.clone();
        let mut out = Vec::new();
        for c in ctors {
            out.extend(self.head_values(c, bound)?);
        }
        let d = self.sorted(out);
        self.domains.insert((adt, bound), d.clone());
        Ok(d)
    }

    fn sorted(&self, mut vals: Vec<Val>) -> Rc<[Val]> {
        let values = &self.values;
        vals.sort_by_key(|&v| (values.depth(v), v_key(v)));
        vals.into()
    }

    /// Values built by `c` with depth at most `bound`.
    fn head_values(&mut self, c: CtorId, bound: usize) -> Result<Vec<Val>, Budget> {
        let total = self.head_count(c, bound);
        if total == 0 {
            return Ok(Vec::new());
        }
        if total.saturating_add(self.values.nodes.len()) > self.opts.value_budget {
            return Err(Budget);
        }
        let fields: Vec<Sort> = self.q.script.decls.adts.ctor_fields(c).collect();
        let mut options: Vec<Rc<[Val]>> = Vec::with_capacity(fields.len());
        for f in fields {
            options.push(match f {
                Sort::Bool => Rc::from([Val::Bool(false), Val::Bool(true)]),
                Sort::Adt(b) => self.domain(b, bound - 1)?,
                Sort::Uninterpreted(_) => unreachable!("no uninterpreted sorts"),
            });
        }
        let mut out = Vec::with_capacity(total);
        let mut index = alloc::vec![0usize; options.len()];
        loop {
            let args: Rc<[Val]> = index.iter().zip(&options).map(|(&i, o)| o[i]).collect();
            out.push(self.values.mk(c, args));
            let mut done = true;
            for pos in (0..index.len()).rev() {
                index[pos] += 1;
                if index[pos] < options[pos].len() {
                    done = false;
                    break;
                }
                index[pos] = 0;
            }
            if done {
                return Ok(out);
            }
        }
    }

    fn allowed_ctors(&self, x: usize, adt: AdtId) -> Vec<CtorId> {
        let ctors = &self.q.script.decls.adts.adt(adt).ctors;
        match &self.allowed[x] {
            None => ctors.clone(),
            Some(allowed) => ctors.iter().copied().filter(|c| allowed[c.index()]).collect(),
        }
    }

    fn var_size(&mut self, x: usize) -> usize {
        match self.sorts[x] {
            Sort::Bool => 2,
            Sort::Adt(a) => self
                .allowed_ctors(x, a)
                .into_iter()
                .map(|c| self.head_count(c, self.bound))
                .fold(0usize, usize::saturating_add),
            Sort::Uninterpreted(_) => unreachable!("no uninterpreted sorts"),
        }
    }

    fn var_domain(&mut self, x: usize) -> Result<Rc<[Val]>, Budget> {
        if let Some(d) = &self.var_domains[x] {
            return Ok(d.clone());
        }
        let d = match self.sorts[x] {
            Sort::Bool => Rc::from([Val::Bool(false), Val::Bool(true)]),
            Sort::Adt(a) => match self.allowed[x] {
                None => self.domain(a, self.bound)?,
                Some(_) => {
                    let mut out = Vec::new();
                    for c in self.allowed_ctors(x, a) {
                        out.extend(self.head_values(c, self.bound)?);
                    }
                    self.sorted(out)
                }
            },
            Sort::Uninterpreted(_) => unreachable!("no uninterpreted sorts"),
        };
        self.var_domains[x] = Some(d.clone());
        Ok(d)
    }

    fn set(&mut self, x: usize, v: Val) -> bool {
        if let Some(old) = self.assign[x] {
            return old == v;
        }
        if self.values.depth(v) > self.bound {
            return false;
        }
        if let (Some(allowed), Some(h)) = (&self.allowed[x], self.values.head(v)) {
            if !allowed[h.index()] {
                return false;
            }
        }
        self.assign[x] = Some(v);
        self.trail.push(x);
        true
    }

    fn undo(&mut self, mark: usize) {
        while self.trail.len() > mark {
            let x = self.trail.pop().expect("non-empty");
            self.assign[x] = None;
        }
    }

    fn propagate(&mut self) -> bool {
        loop {
            let before = self.trail.len();
            for i in 0..self.facts.len() {
                if !self.propagate_fact(self.facts[i]) {
                    return false;
                }
            }
            if self.trail.len() == before {
                return true;
            }
        }
    }

    fn propagate_fact(&mut self, fact: Fact) -> bool {
        let lit = match fact {
            Fact::Bool(b, value) => return self.set(b, Val::Bool(value)),
            Fact::Lit(i) => self.lits[i].clone(),
        };
        match lit {
            Lit::Eq(x, y) => match (self.assign[x], self.assign[y]) {
                (Some(a), None) => self.set(y, a),
                (None, Some(b)) => self.set(x, b),
                (Some(a), Some(b)) => a == b,
                (None, None) => true,
            },
            Lit::Ctor(x, c, args) => {
                let known: Option<Vec<Val>> = args.iter().map(|&a| self.assign[a]).collect();
                match (self.assign[x], known) {
                    (_, Some(vals)) => {
                        let v = self.values.mk(c, vals.into());
                        self.set(x, v)
                    }
                    (Some(v), None) => {
                        if self.values.head(v) != Some(c) {
                            return false;
                        }
                        let children: Vec<Val> = self.values.args(v).to_vec();
                        args.iter().zip(children).all(|(&a, cv)| self.set(a, cv))
                    }
                    (None, None) => true,
                }
            }
            Lit::Sel(x, s, t) => match self.assign[t] {
                Some(tv) => match self.values.child(tv, &self.q.script, s) {
                    Some(cv) => self.set(x, cv),
                    None => true,
                },
                None => true,
            },
            Lit::Test(b, c, t) => match self.assign[t] {
                Some(tv) => self.set(b, Val::Bool(self.values.head(tv) == Some(c))),
                None => true,
            },
            Lit::Tester(c, t) => match self.assign[t] {
                Some(tv) => self.values.head(tv) == Some(c),
                None => true,
            },
        }
    }

    fn lit_value(&self, i: usize, over: &[Option<bool>]) -> Tri {
        if let Some(b) = over[i] {
            return b.into();
        }
        let a = &self.assign;
        let vals = &self.values;
        match &self.lits[i] {
            Lit::Eq(x, y) => match (a[*x], a[*y]) {
                (Some(p), Some(q)) => (p == q).into(),
                _ => Tri::Unknown,
            },
            Lit::Ctor(x, c, args) => {
                let Some(xv) = a[*x] else {
                    return Tri::Unknown;
                };
                if vals.head(xv) != Some(*c) {
                    return Tri::False;
                }
                let mut result = Tri::True;
                for (&arg, &cv) in args.iter().zip(vals.args(xv)) {
                    match a[arg] {
                        Some(v) if v != cv => return Tri::False,
                        Some(_) => {}
                        None => result = Tri::Unknown,
                    }
                }
                result
            }
            Lit::Sel(x, s, t) => match (a[*x], a[*t]) {
                (Some(xv), Some(tv)) => match vals.child(tv, &self.q.script, *s) {
                    Some(cv) => (cv == xv).into(),
                    None => Tri::Unknown,
                },
                _ => Tri::Unknown,
            },
            Lit::Test(b, c, t) => match (a[*b], a[*t]) {
                (Some(bv), Some(tv)) => (bv == Val::Bool(vals.head(tv) == Some(*c))).into(),
                _ => Tri::Unknown,
            },
            Lit::Tester(c, t) => match a[*t] {
                Some(tv) => (vals.head(tv) == Some(*c)).into(),
                None => Tri::Unknown,
            },
        }
    }

    fn eval_skeleton(&self, over: &[Option<bool>]) -> Tri {
        let mut val: Vec<Tri> = Vec::with_capacity(self.skel.len());
        for node in &self.skel {
            let v = match node {
                Skel::Const(b) => (*b).into(),
                Skel::Lit(i) => self.lit_value(*i, over),
                Skel::Var(x) => match self.assign[*x] {
                    Some(Val::Bool(b)) => b.into(),
                    _ => Tri::Unknown,
                },
                Skel::Not(a) => not(val[*a]),
                Skel::And(args) => and(args.iter().map(|&i| val[i])),
                Skel::Or(args) => or(args.iter().map(|&i| val[i])),
                Skel::Implies(p, q) => or([not(val[*p]), val[*q]]),
                Skel::Iff(p, q) => match (val[*p], val[*q]) {
                    (Tri::Unknown, _) | (_, Tri::Unknown) => Tri::Unknown,
                    (p, q) => (p == q).into(),
                },
            };
            val.push(v);
        }
        and(self.roots.iter().map(|&r| val[r]))
    }

    fn run(&mut self) -> Result<bool, Budget> {
        self.undo(0);
        self.var_domains = alloc::vec![None; self.vars.len()];
        self.var_sizes = (0..self.vars.len()).map(|x| self.var_size(x)).collect();
        self.search()
    }

    fn search(&mut self) -> Result<bool, Budget> {
        self.nodes += 1;
        if self.nodes > self.opts.node_budget {
            return Err(Budget);
        }
        if !self.propagate() {
            return Ok(false);
        }
        let none = alloc::vec![None; self.lits.len()];
        if self.eval_skeleton(&none) == Tri::False {
            return Ok(false);
        }
        let pick = (0..self.vars.len())
            .filter(|&x| self.assign[x].is_none())
            .min_by_key(|&x| self.var_sizes[x]);
        let Some(x) = pick else {
            return self.leaf();
        };
        let domain = self.var_domain(x)?;
        for &v in domain.iter() {
            let mark = self.trail.len();
            if self.set(x, v) && self.search()? {
                return Ok(true);
            }
            self.undo(mark);
        }
        Ok(false)
    }

    /// All variables are assigned; choose values for selectors applied
    /// outside their constructor.
    fn leaf(&mut self) -> Result<bool, Budget> {
        let mut groups: Vec<((SelId, Val), Vec<usize>)> = Vec::new();
        for (i, lit) in self.lits.iter().enumerate() {
            if let Lit::Sel(_, s, t) = *lit {
                let tv = self.assign[t].expect("assigned");
                if self.values.child(tv, &self.q.script, s).is_none() {
                    match groups.iter_mut().find(|(k, _)| *k == (s, tv)) {
                        Some((_, members)) => members.push(i),
                        None => groups.push(((s, tv), alloc::vec![i])),
                    }
                }
            }
        }
        let mut candidates: Vec<Vec<Option<Val>>> = Vec::with_capacity(groups.len());
        for ((s, _), members) in &groups {
            let mut c: Vec<Option<Val>> = Vec::new();
            for &i in members {
                let Lit::Sel(x, ..) = self.lits[i] else {
                    unreachable!("selector literal")
                };
                let v = self.assign[x];
                if !c.contains(&v) {
                    c.push(v);
                }
            }
            let size = match self.q.script.decls.adts.sel(*s).sort {
                Sort::Bool => Some(2),
                Sort::Adt(b) => self.finite_size[b.index()],
                Sort::Uninterpreted(_) => None,
            };
            if size.is_none_or(|n| n > c.len()) {
                c.push(None);
            }
            candidates.push(c);
        }
        let mut index = alloc::vec![0usize; groups.len()];
        let mut over = alloc::vec![None; self.lits.len()];
        loop {
            self.nodes += 1;
            if self.nodes > self.opts.node_budget {
                return Err(Budget);
            }
            for (g, (_, members)) in groups.iter().enumerate() {
                let choice = candidates[g][index[g]];
                for &i in members {
                    let Lit::Sel(x, ..) = self.lits[i] else {
                        unreachable!("selector literal")
                    };
                    over[i] = Some(choice.is_some() && choice == self.assign[x]);
                }
            }
            if self.eval_skeleton(&over) == Tri::True {
                self.record(&groups, &candidates, &index);
                return Ok(true);
            }
            let mut done = true;
            for pos in (0..index.len()).rev() {
                index[pos] += 1;
                if index[pos] < candidates[pos].len() {
                    done = false;
                    break;
                }
                index[pos] = 0;
            }
            if done {
                return Ok(false);
            }
        }
    }

    fn record(&mut self, groups: &[((SelId, Val), Vec<usize>)], candidates: &[Vec<Option<Val>>], index: &[usize]) {
        let vars = self
            .vars
            .iter()
            .zip(&self.assign)
            .map(|(&v, a)| (v, self.values.normal(a.expect("assigned"))))
            .collect();
        let slots = groups
            .iter()
            .enumerate()
            .map(|(g, ((sel, arg), _))| SlotChoice {
                sel: *sel,
                arg: self.values.normal(*arg),
                value: candidates[g][index[g]].map(|v| self.values.normal(v)),
            })
            .collect();
        self.witness = Some(Witness { vars, slots });
    }
}

fn v_key(v: Val) -> u64 {
    match v {
        Val::Bool(b) => b as u64,
        Val::Adt(id) => id as u64 + 2,
    }
}

fn not(t: Tri) -> Tri {
    match t {
        Tri::False => Tri::True,
        Tri::True => Tri::False,
        Tri::Unknown => Tri::Unknown,
    }
}

fn and(it: impl IntoIterator<Item = Tri>) -> Tri {
    let mut out = Tri::True;
    for t in it {
        match t {
            Tri::False => return Tri::False,
            Tri::Unknown => out = Tri::Unknown,
            Tri::True => {}
        }
    }
    out
}

fn or(it: impl IntoIterator<Item = Tri>) -> Tri {
    let mut out = Tri::False;
    for t in it {
        match t {
            Tri::True => return Tri::True,
            Tri::Unknown => out = Tri::Unknown,
            Tri::False => {}
        }
    }
    out
}

/// Renders a witness as `name = value` lines.
pub fn render_witness(q: &FlatQuery, w: &Witness) -> String {
    let script = &q.script;
    let sig = &script.decls.adts;
    let mut out = String::new();
    for (v, value) in &w.vars {
        out.push_str(&format!("{} = {}\n", script.store.var_decl(*v).name, value.render(sig)));
    }
    for s in &w.slots {
        let value = match &s.value {
            Some(v) => v.render(sig),
            None => "?".into(),
        };
        out.push_str(&format!("{}({}) = {}\n", sig.sel(s.sel).name, s.arg.render(sig), value));
    }
    out
}

#[cfg(test)]
mod tests;
