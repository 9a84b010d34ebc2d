//! Re-expressing a datatype query over uninterpreted sorts and functions.

use alloc::string::String;
use alloc::vec::Vec;

use crate::frontend::{tester_name, Script};
use crate::ir::{FunDecl, FunId, Node, Op, Sort, SortId, TermId, VarId};

#[derive(Clone, Copy)]
enum CtorImage {
    Constant(VarId),
    Fun(FunId),
}

/// Builds the datatype-free script asserting `assertions` (terms of
/// `src`). Each datatype becomes an uninterpreted sort of the same name;
/// constructors keep their names (constants become nullary symbols),
/// selectors keep theirs, and testers become Boolean functions named by
/// [`tester_name`].
pub fn to_uf(src: &Script, assertions: &[TermId]) -> Script {
    let sig = &src.decls.adts;
    let mut dst = Script {
        check_sat: true,
        ..Script::default()
    };
    dst.decls.sorts = src.decls.sorts.clone();
    let user_sorts = src.decls.sorts.len();
    for a in sig.adt_ids() {
        dst.decls.add_sort(sig.adt(a).name.clone());
    }
    let sort = |s: Sort| match s {
        Sort::Adt(a) => Sort::Uninterpreted(SortId((user_sorts + a.index()) as u32)),
        other => other,
    };
    for f in &src.decls.funs {
        dst.decls.add_fun(FunDecl {
            name: f.name.clone(),
            params: f.params.iter().map(|&p| sort(p)).collect(),
            ret: sort(f.ret),
        });
    }
    let mut ctor_map = Vec::with_capacity(sig.ctor_ids().len());
    let mut sel_map = alloc::vec![None; sig.sel_ids().len()];
    let mut test_map = Vec::with_capacity(sig.ctor_ids().len());
    for c in sig.ctor_ids() {
        let ctor = sig.ctor(c);
        let adt_sort = sort(Sort::Adt(ctor.adt));
        let image = if ctor.arity() == 0 {
            let v = dst
                .store
                .declare_var(ctor.name.clone(), adt_sort)
                .expect("constructor names are unique");
            CtorImage::Constant(v)
        } else {
            CtorImage::Fun(dst.decls.add_fun(FunDecl {
                name: ctor.name.clone(),
                params: sig.ctor_fields(c).map(sort).collect(),
                ret: adt_sort,
            }))
        };
        ctor_map.push(image);
        for &s in &ctor.selectors {
            sel_map[s.index()] = Some(dst.decls.add_fun(FunDecl {
                name: sig.sel(s).name.clone(),
                params: alloc::vec![adt_sort],
                ret: sort(sig.sel(s).sort),
            }));
        }
        test_map.push(dst.decls.add_fun(FunDecl {
            name: tester_name(&ctor.name),
            params: alloc::vec![adt_sort],
            ret: Sort::Bool,
        }));
    }
    let mut var_map = alloc::vec![None; src.store.var_count()];
    for v in src.store.var_ids() {
        let decl = src.store.var_decl(v);
        if decl.internal {
            continue;
        }
        let name: String = decl.name.clone();
        var_map[v.index()] = Some(
            dst.store
                .declare_var(name, sort(decl.sort))
                .expect("variable names are unique"),
        );
    }

    let mut memo: Vec<Option<TermId>> = alloc::vec![None; src.store.len()];
    let Script {
        decls,
        store,
        assertions: out_assertions,
        ..
    } = &mut dst;
    for &root in assertions {
        let mut stack = alloc::vec![(root, false)];
        while let Some((t, ready)) = stack.pop() {
            if memo[t.index()].is_some() {
                continue;
            }
            if !ready {
                stack.push((t, true));
                stack.extend(src.store.children(t).into_iter().map(|c| (c, false)));
                continue;
            }
            let m = |c: &TermId| memo[c.index()].expect("children first");
            let out = match src.store.node(t) {
                Node::Bool(b) => store.mk_bool(*b),
                Node::Var(v) => {
                    let v = var_map[v.index()].expect("assertions use declared variables");
                    store.mk_var(v)
                }
                Node::App(op, args) => {
                    let args: Vec<TermId> = args.iter().map(m).collect();
                    match *op {
                        Op::Ctor(c) => match ctor_map[c.index()] {
                            CtorImage::Constant(v) => store.mk_var(v),
                            CtorImage::Fun(f) => store.mk_app(decls, Op::Fun(f), args),
                        },
                        Op::Sel(s) => {
                            let f = sel_map[s.index()].expect("every selector is mapped");
                            store.mk_app(decls, Op::Fun(f), args)
                        }
                        Op::Test(c) => store.mk_app(decls, Op::Fun(test_map[c.index()]), args),
                        Op::Fun(f) => store.mk_app(decls, Op::Fun(f), args),
                    }
                }
                Node::Eq(a, b) => store.mk_eq(m(a), m(b)),
                Node::Distinct(args) => store.mk_distinct(args.iter().map(m).collect()),
                Node::Not(a) => store.mk_not(m(a)),
                Node::And(args) => store.mk_and(args.iter().map(m).collect()),
                Node::Or(args) => store.mk_or(args.iter().map(m).collect()),
                Node::Implies(a, b) => store.mk_implies(m(a), m(b)),
                Node::Ite(c, a, b) => store.mk_ite(m(c), m(a), m(b)),
            };
            memo[t.index()] = Some(out);
        }
        let t = memo[root.index()].expect("root translated");
        out_assertions.push(t);
    }
    dst
}
