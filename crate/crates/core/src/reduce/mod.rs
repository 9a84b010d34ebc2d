//! Eager reduction of a flat datatype query to uninterpreted functions.
//!
//! Pipeline: rules A and B on every constructor and selector literal
//! (collecting Skolems) → depths → axioms 1–3 for every datatype
//! variable → finite universe instantiation → translation to
//! uninterpreted sorts and functions.

mod axioms;
mod rules;
mod uf;
mod universe;

pub use axioms::{axiom1_exactly_one_tester, axiom2_constants, axiom3_acyclicality, axiom3_nested, CapExceeded};
pub use rules::{expand, rule_a, rule_b, RuleB, SkolemTable};
pub use uf::to_uf;
pub use universe::{universe_info, Universe, UniverseInfo, DEFAULT_UNIVERSE_CAP};

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use hashbrown::HashMap;
use thiserror::Error;

use crate::depth::{build_graph, compute_depths, AdtGraph, DepthMap};
use crate::frontend::{Script, RESERVED_PREFIX};
use crate::ir::{AdtId, Node, NormalTerm, Op, Sort, TermId, VarId};
use crate::preprocess::{FlatLiteral, FlatQuery};

/// Default bound on the number of acyclicality axioms per query.
pub const DEFAULT_AXIOM3_CAP: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReduceOptions {
    pub universe_cap: usize,
    pub axiom3_cap: usize,
    /// Emit acyclicality axioms. Disabling them is only useful for tests.
    pub acyclicality: bool,
}

impl Default for ReduceOptions {
    fn default() -> Self {
        ReduceOptions {
            universe_cap: DEFAULT_UNIVERSE_CAP,
            axiom3_cap: DEFAULT_AXIOM3_CAP,
            acyclicality: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error("resource limit: datatype `{adt}` has {size} values, more than the cap of {cap}")]
    UniverseTooLarge { adt: String, size: String, cap: usize },
    #[error("resource limit: more than {cap} acyclicality axioms")]
    TooManyAxioms { cap: usize },
}

/// Counts of what the reduction produced.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReduceStats {
    /// Datatype variables receiving axioms, Skolems included.
    pub variables: usize,
    pub skolems: usize,
    pub rule_a: usize,
    pub rule_b: usize,
    pub axiom1: usize,
    pub axiom2: usize,
    pub axiom3: usize,
    pub universe_constants: usize,
}

/// The reduced query.
#[derive(Clone, Debug)]
pub struct UfQuery {
    /// Datatype-free script.
    pub script: Script,
    pub depths: DepthMap,
    pub stats: ReduceStats,
}

struct Skolemized {
    script: Script,
    consequences: Vec<TermId>,
    vars: Vec<VarId>,
    stats: ReduceStats,
}

/// Rules A and B on every constructor and selector literal, plus the field
/// expansion of variables whose constructors have only finite fields.
fn skolemize(q: &FlatQuery, info: &UniverseInfo) -> Skolemized {
    let mut s = q.script.clone();
    let mut stats = ReduceStats::default();
    let mut skolems = SkolemTable::default();
    let mut consequences = Vec::new();

    for (lit_term, lit) in &q.literals {
        let Script { decls, store, .. } = &mut s;
        match lit {
            FlatLiteral::DefEq(t, Op::Ctor(f), args) => {
                let parts = rule_a(store, decls, *t, *f, args);
                debug_assert_eq!(parts[0], *lit_term);
                let body = store.mk_and(parts[1..].to_vec());
                consequences.push(store.mk_implies(parts[0], body));
                stats.rule_a += 1;
            }
            FlatLiteral::DefEq(tj, Op::Sel(sel), args) => {
                let b = rule_b(store, decls, &mut skolems, *tj, *sel, args[0]);
                debug_assert_eq!(b.literal, *lit_term);
                if b.fresh {
                    consequences.push(b.implication(store));
                }
                stats.rule_b += 1;
            }
            _ => {}
        }
    }

    // A variable whose constructor has only finitely many argument
    // combinations can take only finitely many values; exposing its fields
    // lets the finite universes account for that.
    let mut roots = s.assertions.clone();
    roots.extend(&consequences);
    for v in adt_vars(&s, &roots) {
        let adt = adt_of(&s, v);
        if info.get(adt).is_finite() {
            continue;
        }
        let ctors = s.decls.adts.adt(adt).ctors.clone();
        for c in ctors {
            let fields: Vec<Sort> = s.decls.adts.ctor_fields(c).collect();
            let finite = |f: &Sort| match f {
                Sort::Bool => true,
                Sort::Adt(b) => info.get(*b).is_finite(),
                Sort::Uninterpreted(_) => false,
            };
            if fields.is_empty() || !fields.iter().all(finite) {
                continue;
            }
            let Script { decls, store, .. } = &mut s;
            let b = expand(store, decls, &mut skolems, v, c);
            if b.fresh {
                consequences.push(b.implication(store));
            }
        }
    }
    stats.skolems = skolems.vars().len();

    let mut roots = s.assertions.clone();
    roots.extend(&consequences);
    let vars = adt_vars(&s, &roots);
    stats.variables = vars.len();
    Skolemized {
        script: s,
        consequences,
        vars,
        stats,
    }
}

/// The depth map of a flat query after Skolemization.
pub fn skolemized_depths(q: &FlatQuery) -> DepthMap {
    let sig = &q.script.decls.adts;
    let g = build_graph(sig);
    let info = universe_info(sig, &g, 0);
    let sk = skolemize(q, &info);
    compute_depths(&g, sk.vars.iter().map(|&v| sk.script.store.var_decl(v).sort))
}

/// Reduces a flat query to an equisatisfiable datatype-free script.
pub fn reduce(q: &FlatQuery, opts: &ReduceOptions) -> Result<UfQuery, ReduceError> {
    let g = build_graph(&q.script.decls.adts);
    let info = universe_info(&q.script.decls.adts, &g, opts.universe_cap);
    let Skolemized {
        script: mut s,
        consequences,
        vars,
        mut stats,
    } = skolemize(q, &info);
    let depths = compute_depths(&g, vars.iter().map(|&v| s.store.var_decl(v).sort));

    let mut ax1 = Vec::new();
    let mut ax2 = Vec::new();
    let mut ax3 = Vec::new();
    let sig = &s.decls.adts;
    let branching = sig
        .adt_ids()
        .map(|a| sig.adt(a).ctors.iter().map(|&c| sig.ctor(c).arity()).sum::<usize>())
        .max()
        .unwrap_or(0);
    let mut ax3_bound: usize = 0;
    let mut ax3_count = 0;
    for &v in &vars {
        let Script { decls, store, .. } = &mut s;
        ax1.push(axiom1_exactly_one_tester(store, decls, v));
        ax2.extend(axiom2_constants(store, decls, v));
        if opts.acyclicality {
            let k = depths.get(adt_of_store(store, v));
            let nested = axiom3_nested(store, decls, &g, v, k, opts.axiom3_cap, &mut ax3_count)
                .map_err(|CapExceeded| ReduceError::TooManyAxioms { cap: opts.axiom3_cap })?;
            ax3.extend(nested);
            let mut power: usize = 1;
            for _ in 0..k {
                power = power.saturating_mul(branching);
                ax3_bound = ax3_bound.saturating_add(power);
            }
        }
    }
    assert!(
        ax3_count <= ax3_bound,
        "{ax3_count} acyclicality axioms exceed the bound {ax3_bound}"
    );
    stats.axiom1 = ax1.len();
    stats.axiom2 = ax2.len();
    stats.axiom3 = ax3_count;

    let mut members: Vec<TermId> = vars.iter().map(|&v| s.store.mk_var(v)).collect();
    let mut roots = s.assertions.clone();
    roots.extend(&consequences);
    members.extend(open_applications(&s, &info, &roots));
    let universe = instantiate_universes(&mut s, &g, &info, &members, opts, &mut stats)?;

    let mut all = s.assertions.clone();
    all.extend(consequences);
    all.extend(ax1);
    all.extend(ax2);
    all.extend(ax3);
    all.extend(universe);
    let script = to_uf(&s, &all);
    Ok(UfQuery {
        script,
        depths,
        stats,
    })
}

/// Desugars, flattens and reduces a parsed script.
pub fn reduce_script(script: &Script, opts: &ReduceOptions) -> Result<UfQuery, ReduceError> {
    let flat = crate::preprocess::flatten(&crate::preprocess::desugar_ite(script));
    reduce(&flat, opts)
}

fn adt_of(s: &Script, v: VarId) -> AdtId {
    adt_of_store(&s.store, v)
}

fn adt_of_store(store: &crate::ir::TermStore, v: VarId) -> AdtId {
    store.var_decl(v).sort.adt().expect("datatype variable")
}

/// Datatype-sorted variables occurring in `roots`, in declaration order.
fn adt_vars(s: &Script, roots: &[TermId]) -> Vec<VarId> {
    let mut vars: Vec<VarId> = s
        .store
        .free_vars(roots)
        .into_iter()
        .filter(|&v| s.store.var_decl(v).sort.adt().is_some())
        .collect();
    vars.sort();
    vars
}

/// Selector and function applications of finite datatype sort under
/// `roots`. Their values are not pinned by any axiom, so they need their
/// own universe disjunction.
fn open_applications(s: &Script, info: &UniverseInfo, roots: &[TermId]) -> Vec<TermId> {
    let store = &s.store;
    let mut seen = hashbrown::HashSet::new();
    let mut stack: Vec<TermId> = roots.to_vec();
    let mut out = Vec::new();
    while let Some(t) = stack.pop() {
        if !seen.insert(t) {
            continue;
        }
        if let Node::App(Op::Sel(_) | Op::Fun(_), _) = store.node(t) {
            if matches!(store.sort(t), Sort::Adt(a) if info.get(a).is_finite()) {
                out.push(t);
            }
        }
        stack.extend(store.children(t).iter().copied());
    }
    out.sort();
    out
}

/// Instantiates the universe of every finite datatype that the sort of
/// some member term is or reaches, and asserts that each member of finite
/// sort is one of its universe's values.
pub fn instantiate_universes(
    s: &mut Script,
    g: &AdtGraph,
    info: &UniverseInfo,
    members: &[TermId],
    opts: &ReduceOptions,
    stats: &mut ReduceStats,
) -> Result<Vec<TermId>, ReduceError> {
    let sig = &s.decls.adts;
    let mut relevant = alloc::vec![false; sig.adt_count()];
    for &m in members {
        let Sort::Adt(a) = s.store.sort(m) else {
            continue;
        };
        relevant[a.index()] = true;
        for b in sig.adt_ids() {
            if g.reaches(a, b) {
                relevant[b.index()] = true;
            }
        }
    }
    let finite: Vec<AdtId> = sig
        .adt_ids()
        .filter(|a| relevant[a.index()] && info.get(*a).is_finite())
        .collect();

    let mut constants: HashMap<NormalTerm, TermId> = HashMap::new();
    let mut per_adt: Vec<(AdtId, Vec<(NormalTerm, TermId)>)> = Vec::new();
    for &a in &finite {
        let u = info.get(a);
        let Some(values) = &u.values else {
            return Err(ReduceError::UniverseTooLarge {
                adt: s.decls.adts.adt(a).name.clone(),
                size: match u.size {
                    Some(usize::MAX) => String::from("more than 2^64"),
                    Some(n) => format!("{n}"),
                    None => String::from("infinitely many"),
                },
                cap: opts.universe_cap,
            });
        };
        let name = s.decls.adts.adt(a).name.clone();
        let mut list = Vec::with_capacity(values.len());
        for (i, value) in values.iter().enumerate() {
            let cname = format!("{RESERVED_PREFIX}u!{name}!{i}");
            let v = match s.store.declare_var(cname.clone(), Sort::Adt(a)) {
                Some(v) => v,
                None => s.store.fresh_var(&cname, Sort::Adt(a)),
            };
            let t = s.store.mk_var(v);
            constants.insert(value.clone(), t);
            list.push((value.clone(), t));
        }
        stats.universe_constants += list.len();
        per_adt.push((a, list));
    }

    let mut out = Vec::new();
    let Script { decls, store, .. } = s;
    for (a, list) in &per_adt {
        let consts: Vec<TermId> = list.iter().map(|(_, t)| *t).collect();
        if consts.len() > 1 {
            out.push(store.mk_distinct(consts.clone()));
        }
        for &m in members {
            if store.sort(m) != Sort::Adt(*a) {
                continue;
            }
            let options = consts.iter().map(|&c| store.mk_eq(m, c)).collect();
            out.push(store.mk_or(options));
        }
        for (value, c) in list {
            let NormalTerm::App(f, children) = value else {
                unreachable!("datatype values are constructor applications");
            };
            let args: Vec<TermId> = children
                .iter()
                .map(|child| match child {
                    NormalTerm::Bool(b) => store.mk_bool(*b),
                    other => constants[other],
                })
                .collect();
            let app = store.mk_app(decls, Op::Ctor(*f), args.clone());
            out.push(store.mk_eq(*c, app));
            for &other in &decls.adts.adt(*a).ctors {
                let test = store.mk_app(decls, Op::Test(other), alloc::vec![*c]);
                out.push(if other == *f { test } else { store.mk_not(test) });
            }
            let sels = decls.adts.ctor(*f).selectors.clone();
            for (sel, arg) in sels.into_iter().zip(args) {
                let app = store.mk_app(decls, Op::Sel(sel), alloc::vec![*c]);
                out.push(store.mk_eq(app, arg));
            }
        }
    }
    Ok(out)
}
