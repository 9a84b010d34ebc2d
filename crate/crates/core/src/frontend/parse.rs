//! Elaboration of s-expressions into a typed [`Script`].

use alloc::borrow::ToOwned;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::sexp::{read_all, Atom, SExpr, Span};
use super::ParseError;
use crate::ir::{
    AdtDecl, CtorDecl, CtorId, Declarations, FunDecl, FunId, Op, SelId, Sort, TermId, TermStore,
    VarId,
};

/// Prefix of every symbol the reducer invents. Datatype queries may not use
/// it; reduced (datatype-free) queries naturally do.
pub const RESERVED_PREFIX: &str = "algb!";

const BUILTINS: &[&str] = &[
    "true", "false", "not", "and", "or", "=>", "xor", "=", "distinct", "ite", "let", "match",
    "forall", "exists", "!", "_", "as", "Bool", "par",
];

const SUPPORTED_LOGICS: &[&str] = &["QF_DT", "QF_UFDT", "QF_UF", "ALL"];

/// A parsed, sort-checked query.
///
/// Declarations keep their source order inside [`Declarations`] and the
/// variable table of `store`; assertions keep theirs in `assertions`.
/// `define-fun` macros are already inlined and `match` is already
/// desugared.
#[derive(Clone, Debug, Default)]
pub struct Script {
    pub decls: Declarations,
    pub store: TermStore,
    pub assertions: Vec<TermId>,
    pub logic: Option<String>,
    pub check_sat: bool,
    pub warnings: Vec<String>,
}

impl Script {
    /// Declared variables that occur in some assertion, in declaration order.
    pub fn used_vars(&self) -> Vec<VarId> {
        let mut used = self.store.free_vars(&self.assertions);
        used.sort();
        used
    }
}

/// Parses SMT-LIB text into a sort-checked [`Script`].
pub fn parse_script(text: &str) -> Result<Script, ParseError> {
    let exprs = read_all(text)?;
    let mut elab = Elaborator::default();
    for cmd in &exprs {
        if elab.command(cmd)? == Flow::Exit {
            break;
        }
    }
    if let Some(span) = elab.reserved_use {
        if elab.script.decls.adts.adt_count() > 0 {
            return Err(ParseError::declaration(
                span,
                format!("symbols starting with `{RESERVED_PREFIX}` are reserved"),
            ));
        }
    }
    Ok(elab.script)
}

#[derive(Clone, Copy, Debug)]
enum Global {
    Var(VarId),
    Ctor(CtorId),
    Sel(SelId),
    Fun(FunId),
    Macro(usize),
}

#[derive(Debug)]
struct Macro {
    params: Vec<VarId>,
    body: TermId,
}

#[derive(PartialEq, Eq)]
enum Flow {
    Continue,
    Exit,
}

type Env = Vec<(String, TermId)>;

#[derive(Default)]
struct Elaborator {
    script: Script,
    globals: HashMap<String, Global>,
    sorts: HashMap<String, Sort>,
    macros: Vec<Macro>,
    reserved_use: Option<Span>,
}

fn list_of<'a>(e: &'a SExpr, what: &str) -> Result<&'a [SExpr], ParseError> {
    e.list()
        .ok_or_else(|| ParseError::syntax(e.span(), &format!("expected {what}")))
}

fn symbol_of<'a>(e: &'a SExpr, what: &str) -> Result<&'a str, ParseError> {
    e.symbol()
        .ok_or_else(|| ParseError::syntax(e.span(), &format!("expected {what}")))
}

fn arity_err(e: &SExpr, msg: &str) -> ParseError {
    ParseError::Sort {
        span: e.span(),
        term: e.to_string(),
        msg: msg.into(),
    }
}

impl Elaborator {
    fn sort_err(&self, e: &SExpr, msg: String) -> ParseError {
        ParseError::Sort {
            span: e.span(),
            term: e.to_string(),
            msg,
        }
    }

    fn sort_name(&self, s: Sort) -> &str {
        self.script.decls.sort_name(s)
    }

    fn check_new_name(&mut self, name: &str, span: Span) -> Result<(), ParseError> {
        if BUILTINS.contains(&name) {
            return Err(ParseError::declaration(
                span,
                format!("cannot redeclare builtin `{name}`"),
            ));
        }
        if self.globals.contains_key(name) || self.sorts.contains_key(name) {
            return Err(ParseError::declaration(
                span,
                format!("symbol `{name}` is already declared"),
            ));
        }
        if name.contains(RESERVED_PREFIX) && self.reserved_use.is_none() {
            self.reserved_use = Some(span);
        }
        Ok(())
    }

    fn command(&mut self, cmd: &SExpr) -> Result<Flow, ParseError> {
        let items = list_of(cmd, "a command")?;
        let Some(head) = items.first() else {
            return Err(ParseError::syntax(cmd.span(), "empty command"));
        };
        let name = symbol_of(head, "a command name")?;
        let args = &items[1..];
        let span = cmd.span();
        match name {
            "set-logic" => {
                let [logic] = args else {
                    return Err(ParseError::syntax(span, "set-logic takes one symbol"));
                };
                let logic = symbol_of(logic, "a logic name")?;
                if !SUPPORTED_LOGICS.contains(&logic) {
                    self.script
                        .warnings
                        .push(format!("{}:{}: logic {logic} is not QF_DT/QF_UFDT; content decides acceptance", span.line, span.col));
                }
                self.script.logic = Some(logic.to_owned());
            }
            "set-info" | "set-option" => {}
            "declare-sort" => self.declare_sort(span, args)?,
            "declare-datatype" => {
                let [name, body] = args else {
                    return Err(ParseError::syntax(span, "declare-datatype takes a name and constructors"));
                };
                let name = symbol_of(name, "a datatype name")?;
                self.declare_datatypes(span, &[(name, args[0].span(), body)])?;
            }
            "declare-datatypes" => self.declare_datatypes_cmd(span, args)?,
            "declare-const" => {
                let [name, sort] = args else {
                    return Err(ParseError::syntax(span, "declare-const takes a name and a sort"));
                };
                self.declare_fun(name, &[], sort)?;
            }
            "declare-fun" => {
                let [name, params, ret] = args else {
                    return Err(ParseError::syntax(span, "declare-fun takes a name, parameter sorts and a sort"));
                };
                let params = list_of(params, "a parameter sort list")?;
                self.declare_fun(name, params, ret)?;
            }
            "define-fun" => self.define_fun(span, args)?,
            "assert" => {
                let [body] = args else {
                    return Err(ParseError::syntax(span, "assert takes one term"));
                };
                let t = self.term(body, &mut Env::new())?;
                self.expect_sort(body, t, Sort::Bool)?;
                self.script.assertions.push(t);
            }
            "check-sat" => {
                if !args.is_empty() {
                    return Err(ParseError::syntax(span, "check-sat takes no arguments"));
                }
                if self.script.check_sat {
                    return Err(ParseError::unsupported(span, "multiple check-sat commands"));
                }
                self.script.check_sat = true;
            }
            "exit" => return Ok(Flow::Exit),
            "define-fun-rec" | "define-funs-rec" => {
                return Err(ParseError::unsupported(span, "recursive definitions"))
            }
            "declare-codatatypes" | "declare-codatatype" => {
                return Err(ParseError::unsupported(span, "codatatypes"))
            }
            "push" | "pop" | "reset" | "reset-assertions" => {
                return Err(ParseError::unsupported(span, "incremental commands"))
            }
            "get-model" | "get-value" | "get-assignment" | "get-proof" | "get-unsat-core"
            | "get-info" | "get-option" | "get-assertions" | "check-sat-assuming" | "echo"
            | "define-sort" => {
                return Err(ParseError::unsupported(span, &format!("command `{name}`")))
            }
            other => {
                return Err(ParseError::syntax(span, &format!("unknown command `{other}`")))
            }
        }
        Ok(Flow::Continue)
    }

    fn declare_sort(&mut self, span: Span, args: &[SExpr]) -> Result<(), ParseError> {
        let (name, arity) = match args {
            [name] => (name, None),
            [name, arity] => (name, Some(arity)),
            _ => return Err(ParseError::syntax(span, "declare-sort takes a name and an arity")),
        };
        if let Some(arity) = arity {
            match arity {
                SExpr::Atom(Atom::Numeral(n), _) if n == "0" => {}
                SExpr::Atom(Atom::Numeral(_), s) => {
                    return Err(ParseError::unsupported(*s, "sort constructors of non-zero arity"))
                }
                other => return Err(ParseError::syntax(other.span(), "expected a numeral")),
            }
        }
        let name = symbol_of(name, "a sort name")?;
        self.check_new_name(name, span)?;
        let id = self.script.decls.add_sort(name.to_owned());
        self.sorts.insert(name.to_owned(), Sort::Uninterpreted(id));
        Ok(())
    }

    fn declare_datatypes_cmd(&mut self, span: Span, args: &[SExpr]) -> Result<(), ParseError> {
        let [heads, bodies] = args else {
            return Err(ParseError::syntax(span, "declare-datatypes takes sort declarations and bodies"));
        };
        let heads = list_of(heads, "a list of sort declarations")?;
        let bodies = list_of(bodies, "a list of datatype bodies")?;
        if heads.is_empty() {
            // Legacy form: (declare-datatypes () ((name ctor…) …)).
            let mut block = Vec::new();
            for body in bodies {
                let items = list_of(body, "a datatype declaration")?;
                let Some((name, ctors)) = items.split_first() else {
                    return Err(ParseError::syntax(body.span(), "empty datatype declaration"));
                };
                block.push((symbol_of(name, "a datatype name")?, name.span(), ctors));
            }
            return self.declare_block(span, block);
        }
        if heads.len() != bodies.len() {
            return Err(ParseError::syntax(span, "datatype names and bodies differ in number"));
        }
        let mut block = Vec::new();
        for (head, body) in heads.iter().zip(bodies) {
            let items = list_of(head, "`(name arity)`")?;
            let [name, arity] = items else {
                return Err(ParseError::syntax(head.span(), "expected `(name arity)`"));
            };
            match arity {
                SExpr::Atom(Atom::Numeral(n), _) if n == "0" => {}
                SExpr::Atom(Atom::Numeral(_), s) => {
                    return Err(ParseError::unsupported(*s, "parametric datatypes"))
                }
                other => return Err(ParseError::syntax(other.span(), "expected a numeral")),
            }
            let name = symbol_of(name, "a datatype name")?;
            let ctors = list_of(body, "a constructor list")?;
            if ctors.first().and_then(SExpr::symbol) == Some("par") {
                return Err(ParseError::unsupported(body.span(), "parametric datatypes"));
            }
            block.push((name, head.span(), ctors));
        }
        self.declare_block(span, block)
    }

    fn declare_datatypes(&mut self, span: Span, single: &[(&str, Span, &SExpr)]) -> Result<(), ParseError> {
        let mut block = Vec::new();
        for &(name, name_span, body) in single {
            let ctors = list_of(body, "a constructor list")?;
            if ctors.first().and_then(SExpr::symbol) == Some("par") {
                return Err(ParseError::unsupported(body.span(), "parametric datatypes"));
            }
            block.push((name, name_span, ctors));
        }
        self.declare_block(span, block)
    }

    fn declare_block(&mut self, span: Span, block: Vec<(&str, Span, &[SExpr])>) -> Result<(), ParseError> {
        let base = self.script.decls.adts.adt_count();
        let mut local: HashMap<&str, Sort> = HashMap::new();
        for (i, &(name, name_span, _)) in block.iter().enumerate() {
            self.check_new_name(name, name_span)?;
            if local
                .insert(name, Sort::Adt(crate::ir::AdtId(u32::try_from(base + i).unwrap_or(u32::MAX))))
                .is_some()
            {
                return Err(ParseError::declaration(name_span, format!("datatype `{name}` declared twice")));
            }
        }
        let mut decls = Vec::new();
        let mut names_in_block: Vec<(String, Span)> = Vec::new();
        for &(name, _, ctors) in &block {
            let mut ctor_decls = Vec::new();
            for ctor in ctors {
                let (cname, fields, cspan) = match ctor {
                    SExpr::Atom(Atom::Symbol(s), sp) => (s.as_str(), &[][..], *sp),
                    SExpr::List(items, sp) => {
                        let Some((cname, fields)) = items.split_first() else {
                            return Err(ParseError::syntax(*sp, "empty constructor declaration"));
                        };
                        (symbol_of(cname, "a constructor name")?, fields, *sp)
                    }
                    other => return Err(ParseError::syntax(other.span(), "expected a constructor declaration")),
                };
                self.check_new_name(cname, cspan)?;
                names_in_block.push((cname.to_owned(), cspan));
                let mut field_decls = Vec::new();
                for field in fields {
                    let items = list_of(field, "`(selector sort)`")?;
                    let [sel, sort] = items else {
                        return Err(ParseError::syntax(field.span(), "expected `(selector sort)`"));
                    };
                    let sel = symbol_of(sel, "a selector name")?;
                    self.check_new_name(sel, field.span())?;
                    names_in_block.push((sel.to_owned(), field.span()));
                    let sort = match sort.symbol().and_then(|s| local.get(s)) {
                        Some(&s) => s,
                        None => self.sort(sort)?,
                    };
                    field_decls.push((sel.to_owned(), sort));
                }
                ctor_decls.push(CtorDecl {
                    name: cname.to_owned(),
                    fields: field_decls,
                });
            }
            decls.push(AdtDecl {
                name: name.to_owned(),
                ctors: ctor_decls,
            });
        }
        let ids = self
            .script
            .decls
            .adts
            .declare_block(decls)
            .map_err(|e| ParseError::declaration(span, e.to_string()))?;
        let sig = &self.script.decls.adts;
        for id in ids {
            let adt = sig.adt(id);
            self.sorts.insert(adt.name.clone(), Sort::Adt(id));
            for &c in &adt.ctors {
                self.globals.insert(sig.ctor(c).name.clone(), Global::Ctor(c));
                for &s in &sig.ctor(c).selectors {
                    self.globals.insert(sig.sel(s).name.clone(), Global::Sel(s));
                }
            }
        }
        Ok(())
    }

    fn declare_fun(&mut self, name: &SExpr, params: &[SExpr], ret: &SExpr) -> Result<(), ParseError> {
        let span = name.span();
        let name = symbol_of(name, "a function name")?;
        self.check_new_name(name, span)?;
        let params = params.iter().map(|p| self.sort(p)).collect::<Result<Vec<_>, _>>()?;
        let ret = self.sort(ret)?;
        let global = if params.is_empty() {
            let v = self
                .script
                .store
                .declare_var(name.to_owned(), ret)
                .ok_or_else(|| ParseError::declaration(span, format!("symbol `{name}` is already declared")))?;
            Global::Var(v)
        } else {
            Global::Fun(self.script.decls.add_fun(FunDecl {
                name: name.to_owned(),
                params,
                ret,
            }))
        };
        self.globals.insert(name.to_owned(), global);
        Ok(())
    }

    fn define_fun(&mut self, span: Span, args: &[SExpr]) -> Result<(), ParseError> {
        let [name, params, ret, body] = args else {
            return Err(ParseError::syntax(span, "define-fun takes a name, parameters, a sort and a body"));
        };
        let name_span = name.span();
        let name = symbol_of(name, "a function name")?;
        let mut env = Env::new();
        let mut param_vars = Vec::new();
        for p in list_of(params, "a parameter list")? {
            let items = list_of(p, "`(name sort)`")?;
            let [pname, psort] = items else {
                return Err(ParseError::syntax(p.span(), "expected `(name sort)`"));
            };
            let pname = symbol_of(pname, "a parameter name")?;
            let psort = self.sort(psort)?;
            let v = self.script.store.placeholder_var("algb!param!", psort);
            let t = self.script.store.mk_var(v);
            env.push((pname.to_owned(), t));
            param_vars.push(v);
        }
        let ret = self.sort(ret)?;
        // The name is not yet visible, so a self-reference fails as undeclared.
        let body_term = self.term(body, &mut env)?;
        self.expect_sort(body, body_term, ret)?;
        self.check_new_name(name, name_span)?;
        self.macros.push(Macro {
            params: param_vars,
            body: body_term,
        });
        self.globals
            .insert(name.to_owned(), Global::Macro(self.macros.len() - 1));
        Ok(())
    }

    fn sort(&self, e: &SExpr) -> Result<Sort, ParseError> {
        match e {
            SExpr::Atom(Atom::Symbol(s), span) => self
                .sorts
                .get(s.as_str())
                .copied()
                .or_else(|| (s == "Bool").then_some(Sort::Bool))
                .ok_or_else(|| match s.as_str() {
                    "Int" | "Real" | "String" | "RegLan" | "RoundingMode" => {
                        ParseError::unsupported(*span, &format!("theory sort `{s}`"))
                    }
                    _ => ParseError::declaration(*span, format!("unknown sort `{s}`")),
                }),
            SExpr::List(items, span) => {
                if items.first().and_then(SExpr::symbol) == Some("_") {
                    Err(ParseError::unsupported(*span, "indexed sorts"))
                } else {
                    Err(ParseError::unsupported(*span, "parametric sorts"))
                }
            }
            other => Err(ParseError::syntax(other.span(), "expected a sort")),
        }
    }

    fn expect_sort(&self, e: &SExpr, t: TermId, sort: Sort) -> Result<(), ParseError> {
        let actual = self.script.store.sort(t);
        if actual == sort {
            Ok(())
        } else {
            Err(self.sort_err(
                e,
                format!("expected sort {}, found {}", self.sort_name(sort), self.sort_name(actual)),
            ))
        }
    }

    fn term(&mut self, e: &SExpr, env: &mut Env) -> Result<TermId, ParseError> {
        match e {
            SExpr::Atom(Atom::Symbol(s), span) => self.symbol_term(e, s, *span, env),
            SExpr::Atom(Atom::Numeral(_) | Atom::Decimal(_), span) => {
                Err(ParseError::unsupported(*span, "arithmetic literals"))
            }
            SExpr::Atom(Atom::Bits(_), span) => Err(ParseError::unsupported(*span, "bit-vector literals")),
            SExpr::Atom(Atom::Str(_), span) => Err(ParseError::unsupported(*span, "string literals")),
            SExpr::Atom(Atom::Keyword(_), span) => Err(ParseError::syntax(*span, "unexpected keyword")),
            SExpr::List(items, span) => {
                let Some((head, args)) = items.split_first() else {
                    return Err(ParseError::syntax(*span, "empty term"));
                };
                match head {
                    SExpr::Atom(Atom::Symbol(h), _) => self.application(e, h, args, env),
                    SExpr::List(hitems, hspan) => {
                        match hitems.first().and_then(SExpr::symbol) {
                            Some("_") => {
                                let ctor = match &hitems[..] {
                                    [_, is, c] if is.symbol() == Some("is") => {
                                        symbol_of(c, "a constructor name")?
                                    }
                                    _ => return Err(ParseError::unsupported(*hspan, "indexed identifiers")),
                                };
                                let Some(Global::Ctor(c)) = self.globals.get(ctor).copied() else {
                                    return Err(ParseError::declaration(*hspan, format!("`{ctor}` is not a constructor")));
                                };
                                self.apply(e, Op::Test(c), args, env)
                            }
                            Some("as") => {
                                let target = self.qualified(head)?;
                                self.apply_symbol(e, target, args, env)
                            }
                            _ => Err(ParseError::syntax(*hspan, "expected a function symbol")),
                        }
                    }
                    other => Err(ParseError::syntax(other.span(), "expected a function symbol")),
                }
            }
        }
    }

    /// Resolves `(as C S)`, checking that `C` produces sort `S`.
    fn qualified(&self, e: &SExpr) -> Result<Global, ParseError> {
        let items = list_of(e, "`(as symbol sort)`")?;
        let [_, name, sort] = items else {
            return Err(ParseError::syntax(e.span(), "expected `(as symbol sort)`"));
        };
        let name = symbol_of(name, "a symbol")?;
        let sort = self.sort(sort)?;
        let global = self
            .globals
            .get(name)
            .copied()
            .ok_or_else(|| ParseError::declaration(e.span(), format!("undeclared symbol `{name}`")))?;
        let actual = match global {
            Global::Ctor(c) => Sort::Adt(self.script.decls.adts.ctor(c).adt),
            Global::Var(v) => self.script.store.var_decl(v).sort,
            Global::Sel(s) => self.script.decls.adts.sel(s).sort,
            Global::Fun(f) => self.script.decls.fun(f).ret,
            Global::Macro(m) => self.script.store.sort(self.macros[m].body),
        };
        if actual != sort {
            return Err(self.sort_err(e, format!("`{name}` does not have sort {}", self.sort_name(sort))));
        }
        Ok(global)
    }

    fn symbol_term(&mut self, e: &SExpr, s: &str, span: Span, env: &mut Env) -> Result<TermId, ParseError> {
        if let Some((_, t)) = env.iter().rev().find(|(n, _)| n == s) {
            return Ok(*t);
        }
        match s {
            "true" => return Ok(self.script.store.mk_bool(true)),
            "false" => return Ok(self.script.store.mk_bool(false)),
            _ => {}
        }
        match self.globals.get(s).copied() {
            Some(g) => self.apply_symbol(e, g, &[], env),
            None => Err(ParseError::declaration(span, format!("undeclared symbol `{s}`"))),
        }
    }

    fn apply_symbol(&mut self, e: &SExpr, g: Global, args: &[SExpr], env: &mut Env) -> Result<TermId, ParseError> {
        match g {
            Global::Var(v) => {
                if !args.is_empty() {
                    return Err(arity_err(e, "constant applied to arguments"));
                }
                Ok(self.script.store.mk_var(v))
            }
            Global::Ctor(c) => self.apply(e, Op::Ctor(c), args, env),
            Global::Sel(s) => self.apply(e, Op::Sel(s), args, env),
            Global::Fun(f) => self.apply(e, Op::Fun(f), args, env),
            Global::Macro(m) => {
                let params = self.macros[m].params.clone();
                let body = self.macros[m].body;
                if params.len() != args.len() {
                    return Err(arity_err(e, &format!("expects {} arguments", params.len())));
                }
                let mut subst: HashMap<TermId, TermId> = HashMap::new();
                for (p, a) in params.iter().zip(args) {
                    let t = self.term(a, env)?;
                    self.expect_sort(a, t, self.script.store.var_decl(*p).sort)?;
                    let pt = self.script.store.mk_var(*p);
                    subst.insert(pt, t);
                }
                let Script { decls, store, .. } = &mut self.script;
                let mut memo = HashMap::new();
                Ok(store.rewrite(decls, body, &mut memo, &mut |_, t| subst.get(&t).copied()))
            }
        }
    }

    fn apply(&mut self, e: &SExpr, op: Op, args: &[SExpr], env: &mut Env) -> Result<TermId, ParseError> {
        let params = op.param_sorts(&self.script.decls);
        if params.len() != args.len() {
            return Err(arity_err(e, &format!("expects {} arguments, got {}", params.len(), args.len())));
        }
        let mut terms = Vec::with_capacity(args.len());
        for (a, sort) in args.iter().zip(params) {
            let t = self.term(a, env)?;
            self.expect_sort(a, t, sort)?;
            terms.push(t);
        }
        Ok(self.script.store.mk_app(&self.script.decls, op, terms))
    }

    fn bool_args(&mut self, args: &[SExpr], env: &mut Env) -> Result<Vec<TermId>, ParseError> {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            let t = self.term(a, env)?;
            self.expect_sort(a, t, Sort::Bool)?;
            out.push(t);
        }
        Ok(out)
    }

    fn same_sort_args(&mut self, e: &SExpr, args: &[SExpr], env: &mut Env) -> Result<Vec<TermId>, ParseError> {
        let mut out = Vec::with_capacity(args.len());
        for a in args {
            let t = self.term(a, env)?;
            if let Some(&first) = out.first() {
                let expected = self.script.store.sort(first);
                if self.script.store.sort(t) != expected {
                    return Err(self.sort_err(e, "arguments have different sorts".into()));
                }
            }
            out.push(t);
        }
        Ok(out)
    }

    fn application(&mut self, e: &SExpr, head: &str, args: &[SExpr], env: &mut Env) -> Result<TermId, ParseError> {
        let span = e.span();
        match head {
            "not" => {
                let [a] = args else {
                    return Err(arity_err(e, "`not` takes one argument"));
                };
                let t = self.bool_args(core::slice::from_ref(a), env)?[0];
                return Ok(self.script.store.mk_not(t));
            }
            "and" | "or" => {
                let ts = self.bool_args(args, env)?;
                let store = &mut self.script.store;
                return Ok(if head == "and" { store.mk_and(ts) } else { store.mk_or(ts) });
            }
            "=>" => {
                if args.len() < 2 {
                    return Err(arity_err(e, "`=>` takes at least two arguments"));
                }
                let ts = self.bool_args(args, env)?;
                let store = &mut self.script.store;
                let mut acc = ts[ts.len() - 1];
                for &t in ts[..ts.len() - 1].iter().rev() {
                    acc = store.mk_implies(t, acc);
                }
                return Ok(acc);
            }
            "xor" => {
                if args.len() < 2 {
                    return Err(arity_err(e, "`xor` takes at least two arguments"));
                }
                let ts = self.bool_args(args, env)?;
                let store = &mut self.script.store;
                let mut acc = ts[0];
                for &t in &ts[1..] {
                    let eq = store.mk_eq(acc, t);
                    acc = store.mk_not(eq);
                }
                return Ok(acc);
            }
            "=" | "distinct" => {
                if args.len() < 2 {
                    return Err(arity_err(e, &format!("`{head}` takes at least two arguments")));
                }
                let ts = self.same_sort_args(e, args, env)?;
                let store = &mut self.script.store;
                if head == "distinct" {
                    return Ok(store.mk_distinct(ts));
                }
                let eqs = ts.windows(2).map(|w| store.mk_eq(w[0], w[1])).collect();
                return Ok(store.mk_and(eqs));
            }
            "ite" => {
                let [c, a, b] = args else {
                    return Err(arity_err(e, "`ite` takes three arguments"));
                };
                let c = self.bool_args(core::slice::from_ref(c), env)?[0];
                let ab = self.same_sort_args(e, &args[1..], env)?;
                let _ = (a, b);
                return Ok(self.script.store.mk_ite(c, ab[0], ab[1]));
            }
            "let" => return self.let_term(e, args, env),
            "match" => return self.match_term(e, args, env),
            "!" => {
                let Some((body, attrs)) = args.split_first() else {
                    return Err(ParseError::syntax(span, "`!` needs a term"));
                };
                if !matches!(attrs.first(), Some(SExpr::Atom(Atom::Keyword(_), _))) {
                    return Err(ParseError::syntax(span, "`!` needs attributes"));
                }
                return self.term(body, env);
            }
            "forall" | "exists" => return Err(ParseError::unsupported(span, "quantifiers")),
            "lambda" => return Err(ParseError::unsupported(span, "lambda terms")),
            "as" => return Err(ParseError::syntax(span, "`as` must be applied")),
            _ => {}
        }
        if let Some((_, _)) = env.iter().rev().find(|(n, _)| n == head) {
            return Err(arity_err(e, "local binding applied to arguments"));
        }
        if let Some(g) = self.globals.get(head).copied() {
            return self.apply_symbol(e, g, args, env);
        }
        if let Some(ctor) = head.strip_prefix("is-") {
            if let Some(Global::Ctor(c)) = self.globals.get(ctor).copied() {
                return self.apply(e, Op::Test(c), args, env);
            }
        }
        match head {
            "+" | "-" | "*" | "div" | "mod" | "abs" | "<" | "<=" | ">" | ">=" | "/" | "to_real"
            | "to_int" | "is_int" => Err(ParseError::unsupported(span, "arithmetic")),
            "select" | "store" => Err(ParseError::unsupported(span, "arrays")),
            h if h.starts_with("bv") || h.starts_with("str.") || h.starts_with("re.") || h.starts_with("fp") => {
                Err(ParseError::unsupported(span, &format!("theory function `{h}`")))
            }
            _ => Err(ParseError::declaration(span, format!("undeclared symbol `{head}`"))),
        }
    }

    fn let_term(&mut self, e: &SExpr, args: &[SExpr], env: &mut Env) -> Result<TermId, ParseError> {
        let [bindings, body] = args else {
            return Err(ParseError::syntax(e.span(), "`let` takes bindings and a body"));
        };
        let bindings = list_of(bindings, "a binding list")?;
        if bindings.is_empty() {
            return Err(ParseError::syntax(e.span(), "`let` needs at least one binding"));
        }
        let mut bound = Vec::with_capacity(bindings.len());
        for b in bindings {
            let items = list_of(b, "`(name term)`")?;
            let [name, value] = items else {
                return Err(ParseError::syntax(b.span(), "expected `(name term)`"));
            };
            let name = symbol_of(name, "a variable name")?;
            bound.push((name.to_owned(), self.term(value, env)?));
        }
        let depth = env.len();
        env.extend(bound);
        let result = self.term(body, env);
        env.truncate(depth);
        result
    }

    /// `match` becomes a chain of `ite` over testers, binding pattern
    /// variables to selector applications.
    fn match_term(&mut self, e: &SExpr, args: &[SExpr], env: &mut Env) -> Result<TermId, ParseError> {
        let [scrutinee, cases] = args else {
            return Err(ParseError::syntax(e.span(), "`match` takes a term and cases"));
        };
        let t = self.term(scrutinee, env)?;
        let Sort::Adt(adt) = self.script.store.sort(t) else {
            return Err(self.sort_err(scrutinee, "match on a non-datatype term".into()));
        };
        let cases = list_of(cases, "a case list")?;
        if cases.is_empty() {
            return Err(ParseError::syntax(e.span(), "`match` needs at least one case"));
        }
        let all_ctors = self.script.decls.adts.adt(adt).ctors.clone();
        let mut covered = alloc::vec![false; all_ctors.len()];
        let mut arms: Vec<(Option<CtorId>, TermId, &SExpr)> = Vec::new();
        let mut exhaustive = false;
        for case in cases {
            let items = list_of(case, "`(pattern term)`")?;
            let [pattern, body] = items else {
                return Err(ParseError::syntax(case.span(), "expected `(pattern term)`"));
            };
            let depth = env.len();
            let ctor = match pattern {
                SExpr::Atom(Atom::Symbol(p), ps) => match self.globals.get(p.as_str()).copied() {
                    Some(Global::Ctor(c)) => {
                        if self.script.decls.adts.ctor(c).adt != adt {
                            return Err(self.sort_err(pattern, "constructor of a different datatype".into()));
                        }
                        if self.script.decls.adts.ctor(c).arity() != 0 {
                            return Err(arity_err(pattern, "constructor pattern needs its fields"));
                        }
                        Some(c)
                    }
                    _ => {
                        let _ = ps;
                        env.push((p.clone(), t));
                        None
                    }
                },
                SExpr::List(items, ps) => {
                    let Some((cname, fields)) = items.split_first() else {
                        return Err(ParseError::syntax(*ps, "empty pattern"));
                    };
                    let cname = symbol_of(cname, "a constructor name")?;
                    let Some(Global::Ctor(c)) = self.globals.get(cname).copied() else {
                        return Err(ParseError::declaration(*ps, format!("`{cname}` is not a constructor")));
                    };
                    if self.script.decls.adts.ctor(c).adt != adt {
                        return Err(self.sort_err(pattern, "constructor of a different datatype".into()));
                    }
                    let sels = self.script.decls.adts.ctor(c).selectors.clone();
                    if sels.len() != fields.len() {
                        return Err(arity_err(pattern, "wrong number of pattern fields"));
                    }
                    for (field, sel) in fields.iter().zip(sels) {
                        let name = match field {
                            SExpr::Atom(Atom::Symbol(s), _)
                                if !matches!(self.globals.get(s.as_str()), Some(Global::Ctor(_))) =>
                            {
                                s.clone()
                            }
                            other => {
                                return Err(ParseError::unsupported(other.span(), "nested constructor patterns"))
                            }
                        };
                        let value = self.script.store.mk_app(&self.script.decls, Op::Sel(sel), alloc::vec![t]);
                        env.push((name, value));
                    }
                    Some(c)
                }
                other => return Err(ParseError::syntax(other.span(), "expected a pattern")),
            };
            let body_term = self.term(body, env);
            env.truncate(depth);
            let body_term = body_term?;
            if let Some((_, first, _)) = arms.first() {
                if self.script.store.sort(*first) != self.script.store.sort(body_term) {
                    return Err(self.sort_err(body, "match arms have different sorts".into()));
                }
            }
            arms.push((ctor, body_term, body));
            match ctor {
                Some(c) => {
                    let pos = all_ctors.iter().position(|&x| x == c).unwrap_or(0);
                    covered[pos] = true;
                    if covered.iter().all(|&b| b) {
                        exhaustive = true;
                    }
                }
                None => exhaustive = true,
            }
            if exhaustive {
                break;
            }
        }
        if !exhaustive {
            return Err(self.sort_err(e, "non-exhaustive match".into()));
        }
        let (_, mut acc, _) = arms.pop().expect("at least one arm");
        while let Some((ctor, body, _)) = arms.pop() {
            let c = ctor.expect("catch-all arms end the case list");
            let test = self.script.store.mk_app(&self.script.decls, Op::Test(c), alloc::vec![t]);
            acc = self.script.store.mk_ite(test, body, acc);
        }
        Ok(acc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ir::Node;

    const TOWER: &str = "
        (declare-datatypes ((block 0) (tower 0))
          (((A) (B))
           ((Empty) (Stack (top block) (rest tower)))))
    ";

    #[test]
    fn tower_declaration() {
        let s = parse_script(TOWER).unwrap();
        let sig = &s.decls.adts;
        let tower = sig.find_adt("tower").unwrap();
        assert_eq!(sig.adt(tower).ctors.len(), 2);
        let stack = sig.find_ctor("Stack").unwrap();
        assert_eq!(sig.ctor(stack).arity(), 2);
    }

    #[test]
    fn trivially_true_assertion() {
        let s = parse_script("(assert true) (check-sat)").unwrap();
        assert_eq!(s.assertions.len(), 1);
        assert_eq!(*s.store.node(s.assertions[0]), Node::Bool(true));
        assert!(s.check_sat);
    }

    #[test]
    fn cycle_query_has_four_conjuncts() {
        let text = alloc::format!(
            "{TOWER}
            (declare-const x tower) (declare-const y tower)
            (assert (and ((_ is Stack) x) ((_ is Stack) y) (= y (rest x)) (= x (rest y))))
            (check-sat)"
        );
        let s = parse_script(&text).unwrap();
        let Node::And(parts) = s.store.node(s.assertions[0]) else {
            panic!("expected a conjunction");
        };
        assert_eq!(parts.len(), 4);
    }

    #[test]
    fn match_desugars_to_testers() {
        let text = alloc::format!(
            "{TOWER}
            (declare-const x tower)
            (assert (match x ((Empty false) ((Stack b r) (= r Empty)))))"
        );
        let s = parse_script(&text).unwrap();
        let Node::Ite(c, _, _) = s.store.node(s.assertions[0]) else {
            panic!("expected ite");
        };
        assert!(matches!(s.store.node(*c), Node::App(Op::Test(_), _)));
    }

    #[test]
    fn nested_patterns_are_unsupported() {
        let text = alloc::format!(
            "{TOWER}
            (declare-const x tower)
            (assert (match x ((Empty false) ((Stack A r) true))))"
        );
        assert!(matches!(parse_script(&text), Err(ParseError::Unsupported { .. })));
    }

    #[test]
    fn define_fun_is_inlined() {
        let text = alloc::format!(
            "{TOWER}
            (declare-const x tower)
            (define-fun nonempty ((t tower)) Bool ((_ is Stack) t))
            (assert (nonempty x))"
        );
        let s = parse_script(&text).unwrap();
        let Node::App(Op::Test(_), args) = s.store.node(s.assertions[0]) else {
            panic!("macro not inlined");
        };
        assert!(matches!(s.store.node(args[0]), Node::Var(_)));
    }

    #[test]
    fn recursive_define_fun_is_rejected() {
        let err = parse_script("(define-fun f ((b Bool)) Bool (f b))").unwrap_err();
        assert!(err.to_string().contains("undeclared symbol `f`"), "{err}");
        assert!(matches!(
            parse_script("(define-fun-rec f ((b Bool)) Bool b)"),
            Err(ParseError::Unsupported { .. })
        ));
    }

    #[test]
    fn rejections() {
        let unsupported = [
            "(declare-datatypes ((L 1)) ((par (T) ((nil) (cons (hd T) (tl (L T))))))) ",
            "(declare-fun x () Int)",
            "(assert (forall ((b Bool)) b))",
            "(assert true) (check-sat) (check-sat)",
            "(push 1)",
        ];
        for text in unsupported {
            assert!(
                matches!(parse_script(text), Err(ParseError::Unsupported { .. })),
                "{text}"
            );
        }
        let sort_error = alloc::format!("{TOWER} (declare-const x tower) (assert (= x A))");
        assert!(matches!(parse_script(&sort_error), Err(ParseError::Sort { .. })));
        assert!(matches!(
            parse_script("(declare-const x Bool) (declare-const x Bool)"),
            Err(ParseError::Declaration { .. })
        ));
        assert!(matches!(parse_script("(assert y)"), Err(ParseError::Declaration { .. })));
    }

    #[test]
    fn reserved_names_only_rejected_alongside_datatypes() {
        assert!(parse_script("(declare-const algb!x Bool) (assert algb!x)").is_ok());
        let text = alloc::format!("{TOWER} (declare-const algb!x tower)");
        assert!(matches!(parse_script(&text), Err(ParseError::Declaration { .. })));
    }

    #[test]
    fn legacy_datatype_syntax_and_is_shorthand() {
        let text = "(declare-datatypes () ((nat (Z) (S (p nat)))))
                    (declare-const n nat)
                    (assert (is-S n))";
        let s = parse_script(text).unwrap();
        assert!(matches!(s.store.node(s.assertions[0]), Node::App(Op::Test(_), _)));
    }

    #[test]
    fn unknown_logic_is_a_warning() {
        let s = parse_script("(set-logic QF_LIA) (assert true)").unwrap();
        assert_eq!(s.warnings.len(), 1);
    }
}
