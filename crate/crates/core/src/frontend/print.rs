//! SMT-LIB rendering of scripts.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt::Write;

use hashbrown::{HashMap, HashSet};

use super::parse::Script;
use super::sexp::is_symbol_char;
use crate::ir::{Declarations, Node, Op, TermId, TermStore};

/// Name of the uninterpreted function standing for the tester of `ctor`.
pub fn tester_name(ctor: &str) -> String {
    format!("{}is-{ctor}", super::RESERVED_PREFIX)
}

/// Renders a symbol, adding `|…|` quotes when it is not a simple symbol.
pub fn quote_symbol(name: &str) -> String {
    let simple = !name.is_empty()
        && !name.starts_with(|c: char| c.is_ascii_digit())
        && name.chars().all(is_symbol_char);
    if simple {
        name.to_string()
    } else {
        format!("|{name}|")
    }
}

/// Renders a datatype-free script as a `QF_UF` query.
pub fn print_uf_script(script: &Script) -> String {
    debug_assert_eq!(script.decls.adts.adt_count(), 0, "datatypes in a UF script");
    print_script(script)
}

/// Renders any script: logic, sorts, datatypes (as one block), functions,
/// constants, assertions and a final `check-sat`. Output depends only on
/// declaration and assertion order.
pub fn print_script(script: &Script) -> String {
    let Script {
        decls,
        store,
        assertions,
        ..
    } = script;
    let sig = &decls.adts;
    let mut out = String::new();
    let logic = match (sig.adt_count() > 0, !decls.funs.is_empty() || !decls.sorts.is_empty()) {
        (false, _) => "QF_UF",
        (true, false) => "QF_DT",
        (true, true) => "QF_UFDT",
    };
    let _ = writeln!(out, "(set-logic {logic})");
    for name in &decls.sorts {
        let _ = writeln!(out, "(declare-sort {} 0)", quote_symbol(name));
    }
    if sig.adt_count() > 0 {
        out.push_str("(declare-datatypes (");
        for (i, a) in sig.adt_ids().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            let _ = write!(out, "({} 0)", quote_symbol(&sig.adt(a).name));
        }
        out.push_str(") (");
        for (i, a) in sig.adt_ids().enumerate() {
            if i > 0 {
                out.push_str("\n  ");
            }
            out.push('(');
            for (j, &c) in sig.adt(a).ctors.iter().enumerate() {
                if j > 0 {
                    out.push(' ');
                }
                let ctor = sig.ctor(c);
                let _ = write!(out, "({}", quote_symbol(&ctor.name));
                for &s in &ctor.selectors {
                    let sel = sig.sel(s);
                    let _ = write!(
                        out,
                        " ({} {})",
                        quote_symbol(&sel.name),
                        quote_symbol(decls.sort_name(sel.sort))
                    );
                }
                out.push(')');
            }
            out.push(')');
        }
        out.push_str("))\n");
    }
    for f in &decls.funs {
        let params: Vec<String> = f
            .params
            .iter()
            .map(|&p| quote_symbol(decls.sort_name(p)))
            .collect();
        let _ = writeln!(
            out,
            "(declare-fun {} ({}) {})",
            quote_symbol(&f.name),
            params.join(" "),
            quote_symbol(decls.sort_name(f.ret))
        );
    }
    for v in store.var_ids() {
        let decl = store.var_decl(v);
        if decl.internal {
            continue;
        }
        let _ = writeln!(
            out,
            "(declare-fun {} () {})",
            quote_symbol(&decl.name),
            quote_symbol(decls.sort_name(decl.sort))
        );
    }
    let let_prefix = let_prefix(decls, store);
    let mut next = 0usize;
    for &a in assertions {
        out.push_str("(assert ");
        write_shared(&mut out, store, decls, a, &let_prefix, &mut next);
        out.push_str(")\n");
    }
    out.push_str("(check-sat)\n");
    out
}

/// A prefix for `let` names that no declared symbol starts with.
fn let_prefix(decls: &Declarations, store: &TermStore) -> String {
    let mut prefix = format!("{}let!", super::RESERVED_PREFIX);
    let clashes = |p: &str| {
        decls.funs.iter().any(|f| f.name.starts_with(p))
            || store.var_ids().any(|v| store.var_decl(v).name.starts_with(p))
    };
    while clashes(&prefix) {
        prefix.push('!');
    }
    prefix
}

fn is_compound(store: &TermStore, t: TermId) -> bool {
    match store.node(t) {
        Node::Bool(_) | Node::Var(_) => false,
        Node::App(_, args) => !args.is_empty(),
        _ => true,
    }
}

/// Writes `root`, binding repeated compound subterms with nested `let`s so
/// the text stays linear in the size of the term graph. Bindings of one
/// `let` only refer to names bound by enclosing ones.
fn write_shared(
    out: &mut String,
    store: &TermStore,
    decls: &Declarations,
    root: TermId,
    prefix: &str,
    next: &mut usize,
) {
    let mut seen: HashSet<TermId> = HashSet::new();
    let mut order = Vec::new();
    let mut stack = alloc::vec![(root, false)];
    while let Some((t, done)) = stack.pop() {
        if done {
            order.push(t);
        } else if seen.insert(t) {
            stack.push((t, true));
            for &c in store.children(t).iter().rev() {
                stack.push((c, false));
            }
        }
    }
    let mut uses: HashMap<TermId, u32> = HashMap::new();
    for &t in &order {
        for &c in store.children(t).iter() {
            *uses.entry(c).or_insert(0) += 1;
        }
    }
    let shared = |t: TermId| {
        t != root
            && uses.get(&t).is_some_and(|&n| n > 1)
            && is_compound(store, t)
            && store.children(t).iter().any(|&c| is_compound(store, c))
    };
    let mut below: HashMap<TermId, usize> = HashMap::new();
    let mut bindings: Vec<(usize, TermId)> = Vec::new();
    for &t in &order {
        let lvl = store
            .children(t)
            .iter()
            .map(|c| below[c])
            .max()
            .unwrap_or(0);
        if shared(t) {
            bindings.push((lvl + 1, t));
            below.insert(t, lvl + 1);
        } else {
            below.insert(t, lvl);
        }
    }
    if bindings.is_empty() {
        write_term(out, store, decls, root);
        return;
    }
    bindings.sort_by_key(|&(lvl, _)| lvl);
    let mut names: HashMap<TermId, String> = HashMap::new();
    let mut open = 0;
    let mut i = 0;
    while i < bindings.len() {
        let lvl = bindings[i].0;
        out.push_str("(let (");
        open += 1;
        let mut first = true;
        let mut level_names = Vec::new();
        while i < bindings.len() && bindings[i].0 == lvl {
            let t = bindings[i].1;
            let name = format!("{prefix}{next}");
            *next += 1;
            if !first {
                out.push(' ');
            }
            first = false;
            let _ = write!(out, "({} ", quote_symbol(&name));
            write_with(out, store, decls, t, &names);
            out.push(')');
            level_names.push((t, name));
            i += 1;
        }
        out.push_str(") ");
        names.extend(level_names);
    }
    write_with(out, store, decls, root, &names);
    for _ in 0..open {
        out.push(')');
    }
}

enum Item {
    Term(TermId),
    Text(&'static str),
}

/// Appends the SMT-LIB text of `root`. Iterative, so deep terms are safe.
pub fn write_term(out: &mut String, store: &TermStore, decls: &Declarations, root: TermId) {
    write_with(out, store, decls, root, &HashMap::new());
}

fn write_with(
    out: &mut String,
    store: &TermStore,
    decls: &Declarations,
    root: TermId,
    names: &HashMap<TermId, String>,
) {
    let sig = &decls.adts;
    let mut stack = alloc::vec![Item::Term(root)];
    while let Some(item) = stack.pop() {
        let t = match item {
            Item::Text(s) => {
                out.push_str(s);
                continue;
            }
            Item::Term(t) => t,
        };
        if t != root {
            if let Some(name) = names.get(&t) {
                out.push_str(&quote_symbol(name));
                continue;
            }
        }
        let head: String = match store.node(t) {
            Node::Bool(b) => {
                out.push_str(if *b { "true" } else { "false" });
                continue;
            }
            Node::Var(v) => {
                out.push_str(&quote_symbol(&store.var_decl(*v).name));
                continue;
            }
            Node::App(op, args) => {
                let head = match *op {
                    Op::Ctor(c) => quote_symbol(&sig.ctor(c).name),
                    Op::Sel(s) => quote_symbol(&sig.sel(s).name),
                    Op::Test(c) => format!("(_ is {})", quote_symbol(&sig.ctor(c).name)),
                    Op::Fun(f) => quote_symbol(&decls.fun(f).name),
                };
                if args.is_empty() {
                    out.push_str(&head);
                    continue;
                }
                head
            }
            Node::Eq(..) => "=".into(),
            Node::Distinct(_) => "distinct".into(),
            Node::Not(_) => "not".into(),
            Node::And(_) => "and".into(),
            Node::Or(_) => "or".into(),
            Node::Implies(..) => "=>".into(),
            Node::Ite(..) => "ite".into(),
        };
        let args = store.children(t);
        out.push('(');
        out.push_str(&head);
        stack.push(Item::Text(")"));
        for &a in args.iter().rev() {
            stack.push(Item::Term(a));
            stack.push(Item::Text(" "));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::parse_script;

    const UF: &str = "(declare-sort S 0)
        (declare-fun f (S) S)
        (declare-fun g (S S) S)
        (declare-const x S)";

    fn round_trip(text: &str) -> String {
        let s = parse_script(text).unwrap();
        let printed = print_script(&s);
        let again = parse_script(&printed).unwrap();
        assert_eq!(print_script(&again), printed);
        assert_eq!(again.assertions.len(), s.assertions.len());
        printed
    }

    #[test]
    fn single_uses_are_inline() {
        let out = round_trip(&format!("{UF}(assert (= (f (f x)) x))"));
        assert!(out.contains("(assert (= (f (f x)) x))"), "{out}");
    }

    #[test]
    fn repeated_subterms_are_bound_once() {
        let out = round_trip(&format!("{UF}(assert (= (g (f (f x)) (f (f (f x)))) (f (f x))))"));
        assert!(
            out.contains("(assert (let ((algb!let!0 (f (f x)))) (= (g algb!let!0 (f algb!let!0)) algb!let!0)))"),
            "{out}"
        );
    }

    #[test]
    fn nested_bindings_follow_dependencies() {
        let deep = "(f (f (f x)))";
        let out = round_trip(&format!("{UF}(assert (distinct (g {deep} (f {deep})) (f (g {deep} (f {deep}))) (f (f x))))"));
        assert_eq!(out.matches("(let ").count(), 3, "{out}");
    }

    #[test]
    fn let_names_avoid_declared_symbols() {
        let out = round_trip(&format!("{UF}(declare-const algb!let!0 S)(assert (= (f (f x)) (g (f (f x)) algb!let!0)))"));
        assert!(out.contains("(let ((algb!let!!0 (f (f x))))"), "{out}");
    }
}
