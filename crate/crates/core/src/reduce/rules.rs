//! The constructor and selector rewrite rules.

use alloc::format;
use alloc::vec::Vec;

use hashbrown::HashMap;

use crate::frontend::RESERVED_PREFIX;
use crate::ir::{CtorId, Declarations, Op, SelId, TermId, TermStore, VarId};

/// Rule A for `t = f(s₁, …, s_l)`: the literal itself, `is-f(t)`, and
/// `fⁱ(t) = sᵢ` for every field.
pub fn rule_a(
    store: &mut TermStore,
    decls: &Declarations,
    t: VarId,
    f: CtorId,
    args: &[VarId],
) -> Vec<TermId> {
    let tt = store.mk_var(t);
    let args: Vec<TermId> = args.iter().map(|&s| store.mk_var(s)).collect();
    let app = store.mk_app(decls, Op::Ctor(f), args.clone());
    let mut out = alloc::vec![store.mk_eq(tt, app)];
    out.push(store.mk_app(decls, Op::Test(f), alloc::vec![tt]));
    out.extend(selector_equations(store, decls, tt, f, &args));
    out
}

fn selector_equations(
    store: &mut TermStore,
    decls: &Declarations,
    t: TermId,
    f: CtorId,
    args: &[TermId],
) -> Vec<TermId> {
    let sels = decls.adts.ctor(f).selectors.clone();
    sels.iter()
        .zip(args)
        .map(|(&sel, &s)| {
            let app = store.mk_app(decls, Op::Sel(sel), alloc::vec![t]);
            store.mk_eq(app, s)
        })
        .collect()
}

/// Skolem variables standing for the fields of a variable, one set per
/// (variable, constructor) pair.
#[derive(Clone, Debug, Default)]
pub struct SkolemTable {
    table: HashMap<(VarId, CtorId), Vec<VarId>>,
    order: Vec<VarId>,
}

impl SkolemTable {
    /// The Skolems of `(t, f)` and whether they were just created.
    pub fn get_or_create(
        &mut self,
        store: &mut TermStore,
        decls: &Declarations,
        t: VarId,
        f: CtorId,
    ) -> (Vec<VarId>, bool) {
        if let Some(sks) = self.table.get(&(t, f)) {
            return (sks.clone(), false);
        }
        let prefix = format!("{RESERVED_PREFIX}sk!");
        let sks: Vec<VarId> = decls
            .adts
            .ctor_fields(f)
            .collect::<Vec<_>>()
            .into_iter()
            .map(|sort| store.fresh_var(&prefix, sort))
            .collect();
        self.order.extend(&sks);
        self.table.insert((t, f), sks.clone());
        (sks, true)
    }

    /// Every Skolem variable, in creation order.
    pub fn vars(&self) -> &[VarId] {
        &self.order
    }
}

/// The result of rule B on `t_j = fʲ(t)`.
#[derive(Clone, Debug)]
pub struct RuleB {
    /// The selector literal, kept as is.
    pub literal: TermId,
    /// `is-f(t)`.
    pub guard: TermId,
    /// `f(s⃗) = t` and `fⁱ(t) = sᵢ` over the Skolems `s⃗`.
    pub expansion: Vec<TermId>,
    pub skolems: Vec<VarId>,
    /// False when the Skolems were shared with an earlier application.
    pub fresh: bool,
}

impl RuleB {
    /// `guard → ⋀ expansion`.
    pub fn implication(&self, store: &mut TermStore) -> TermId {
        let body = store.mk_and(self.expansion.clone());
        store.mk_implies(self.guard, body)
    }
}

/// Rule B for `t_j = fʲ(t)`, Skolemizing the fields of `t`.
pub fn rule_b(
    store: &mut TermStore,
    decls: &Declarations,
    skolems: &mut SkolemTable,
    t_j: VarId,
    sel: SelId,
    t: VarId,
) -> RuleB {
    let tt = store.mk_var(t);
    let tj = store.mk_var(t_j);
    let app = store.mk_app(decls, Op::Sel(sel), alloc::vec![tt]);
    let literal = store.mk_eq(tj, app);
    let mut out = expand(store, decls, skolems, t, decls.adts.sel(sel).ctor);
    out.literal = literal;
    out
}

/// The guarded expansion `is-f(t) → (f(s⃗) = t ∧ ⋀ fⁱ(t) = sᵢ)` with
/// shared Skolems; `literal` is left as `is-f(t)`.
pub fn expand(
    store: &mut TermStore,
    decls: &Declarations,
    skolems: &mut SkolemTable,
    t: VarId,
    f: CtorId,
) -> RuleB {
    let tt = store.mk_var(t);
    let (sks, fresh) = skolems.get_or_create(store, decls, t, f);
    let sk_terms: Vec<TermId> = sks.iter().map(|&s| store.mk_var(s)).collect();
    let app = store.mk_app(decls, Op::Ctor(f), sk_terms.clone());
    let mut expansion = alloc::vec![store.mk_eq(tt, app)];
    expansion.extend(selector_equations(store, decls, tt, f, &sk_terms));
    let guard = store.mk_app(decls, Op::Test(f), alloc::vec![tt]);
    RuleB {
        literal: guard,
        guard,
        expansion,
        skolems: sks,
        fresh,
    }
}
