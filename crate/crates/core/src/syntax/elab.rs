//! Elaboration of parsed expressions against the declaration tables.
//!
//! Programs are elaborated in two passes: the first collects constructors,
//! predicate arities (clause heads, hypothesis antecedents, axioms), weights
//! and the mode; the second builds clauses and properties with the complete
//! tables, then Clark-completes every predicate.

use super::compile::complete;
use super::goal::Goal;
use super::lexer::Pos;
use super::parser::{parse_expr, parse_items, BinOp, Expr, Item};
use super::print::{CERT_CONS, CERT_NIL, PAIR};
use super::{Clause, Mode, PredDef, Program, PropertySpec, Query, SyntaxError};
use crate::terms::{Store, Term, CONS};
use std::collections::{BTreeMap, HashMap};

/// Certificate constructors and their arities. `collect` also accepts one
/// argument (the list, with an empty tail).
pub const CERT_ARITIES: &[(&str, usize)] = &[
    ("height", 1),
    ("sze", 2),
    ("max", 1),
    ("random", 0),
    ("noweight", 0),
    ("cases", 3),
    ("collect", 2),
    ("huniv", 2),
    ("permissive", 0),
    (PAIR, 2),
    ("subterm", 0),
    ("proper", 0),
    ("mtt", 0),
    ("meq", 0),
    ("mand", 2),
    ("mor", 2),
    ("msome", 2),
    ("mbc", 1),
    ("minit", 0),
    ("mimp", 1),
    ("mall", 1),
    ("mlimp", 1),
    ("mbang", 1),
];

const KEYWORDS: &[&str] = &["ctor", "axiom", "weights", "mode", "prop", "tt", "ff", "some", "pi"];

fn cert_arity(name: &str) -> Option<usize> {
    CERT_ARITIES.iter().find(|(n, _)| *n == name).map(|(_, a)| *a)
}

fn wild_name(n: u32) -> String {
    format!("$w{n}")
}

/// Free variables in order of first occurrence; each `_` is its own variable.
fn free_vars(e: &Expr, bound: &mut Vec<String>, out: &mut Vec<String>) {
    match e {
        Expr::Var(n, _) => {
            if !bound.contains(n) && !out.contains(n) {
                out.push(n.clone());
            }
        }
        Expr::Wild(n, _) => out.push(wild_name(*n)),
        Expr::Ident(..) | Expr::Int(..) => {}
        Expr::App(h, args) => {
            free_vars(h, bound, out);
            for a in args {
                free_vars(a, bound, out);
            }
        }
        Expr::Lam(x, body, _) => {
            bound.push(x.clone());
            free_vars(body, bound, out);
            bound.pop();
        }
        Expr::Bin(_, l, r, _) => {
            free_vars(l, bound, out);
            free_vars(r, bound, out);
        }
        Expr::Bang(g, _) => free_vars(g, bound, out),
        Expr::List(items, _) => {
            for i in items {
                free_vars(i, bound, out);
            }
        }
    }
}

fn vars_of<'a>(es: impl IntoIterator<Item = &'a Expr>) -> Vec<String> {
    let mut out = Vec::new();
    for e in es {
        free_vars(e, &mut Vec::new(), &mut out);
    }
    out
}

fn lookup(scope: &[String], name: &str) -> Option<Term> {
    scope
        .iter()
        .rposition(|n| n == name)
        .map(|p| Term::Bound((scope.len() - 1 - p) as u32))
}

fn arity_error(pos: Pos, name: &str, expected: usize, found: usize) -> SyntaxError {
    SyntaxError::Arity {
        line: pos.line,
        col: pos.col,
        name: name.to_string(),
        expected,
        found,
    }
}

struct Env<'a> {
    ctors: &'a BTreeMap<String, usize>,
    preds: &'a BTreeMap<String, usize>,
    mode: Mode,
}

impl Env<'_> {
    /// A constant applied to `found` arguments.
    fn constant(&self, name: &str, found: usize, pos: Pos) -> Result<Term, SyntaxError> {
        if let Some(&arity) = self.ctors.get(name) {
            if arity != found {
                return Err(arity_error(pos, name, arity, found));
            }
        } else if let Some(&arity) = self.preds.get(name) {
            // A predicate is data either bare or fully applied.
            if found != 0 && found != arity {
                return Err(arity_error(pos, name, arity, found));
            }
        } else {
            return Err(SyntaxError::UnknownCtor {
                line: pos.line,
                col: pos.col,
                name: name.to_string(),
            });
        }
        Ok(Term::cnst(name))
    }

    fn term(&self, e: &Expr, scope: &mut Vec<String>) -> Result<Term, SyntaxError> {
        match e {
            Expr::Ident(n, pos) => match lookup(scope, n) {
                Some(t) => Ok(t),
                None => self.constant(n, 0, *pos),
            },
            Expr::Var(n, pos) => lookup(scope, n)
                .ok_or_else(|| SyntaxError::invalid(*pos, format!("unbound variable {n}"))),
            Expr::Wild(n, pos) => lookup(scope, &wild_name(*n))
                .ok_or_else(|| SyntaxError::invalid(*pos, "`_` is not allowed here")),
            Expr::Int(n, _) => Ok(Term::Int(*n)),
            Expr::App(h, args) => {
                let head = match &**h {
                    Expr::Ident(n, pos) if lookup(scope, n).is_none() => self.constant(n, args.len(), *pos)?,
                    other => self.term(other, scope)?,
                };
                let args = args.iter().map(|a| self.term(a, scope)).collect::<Result<Vec<_>, _>>()?;
                Ok(Term::apps(head, args))
            }
            Expr::Lam(x, body, _) => {
                scope.push(x.clone());
                let b = self.term(body, scope);
                scope.pop();
                Ok(Term::abs(b?))
            }
            Expr::Bin(BinOp::Cons, l, r, pos) => {
                match self.ctors.get(CONS) {
                    Some(2) => {}
                    Some(&k) => return Err(arity_error(*pos, CONS, k, 2)),
                    None => {
                        return Err(SyntaxError::invalid(*pos, "`::` needs a declaration `ctor cons 2.`"));
                    }
                }
                Ok(Term::cons(self.term(l, scope)?, self.term(r, scope)?))
            }
            Expr::Bin(op, _, _, pos) => Err(SyntaxError::invalid(*pos, format!("{op:?} connective where a term is expected"))),
            Expr::Bang(_, pos) => Err(SyntaxError::invalid(*pos, "`!` where a term is expected")),
            Expr::List(_, pos) => Err(SyntaxError::invalid(*pos, "list literals are only allowed in certificates and weights")),
        }
    }

    fn atom(&self, e: &Expr, scope: &mut Vec<String>) -> Result<Term, SyntaxError> {
        if let Some((name, n)) = e.head_ident() {
            if lookup(scope, name).is_none() {
                match self.preds.get(name) {
                    Some(&arity) if arity != n => return Err(arity_error(e.pos(), name, arity, n)),
                    Some(_) => {}
                    None => {
                        let pos = e.pos();
                        return Err(SyntaxError::UnknownPredicate {
                            line: pos.line,
                            col: pos.col,
                            name: name.to_string(),
                        });
                    }
                }
            }
        }
        let t = self.term(e, scope)?;
        match t.spine().0 {
            Term::Const(_) | Term::Bound(_) => Ok(t),
            _ => Err(SyntaxError::invalid(e.pos(), "expected an atomic formula")),
        }
    }

    fn require(&self, at_least: Mode, what: &str, pos: Pos) -> Result<(), SyntaxError> {
        if self.mode < at_least {
            return Err(SyntaxError::invalid(
                pos,
                format!("{what} is not available in {} mode", self.mode.name()),
            ));
        }
        Ok(())
    }

    fn goal(&self, e: &Expr, scope: &mut Vec<String>) -> Result<Goal, SyntaxError> {
        let sub = |g: &Expr, scope: &mut Vec<String>| self.goal(g, scope).map(std::sync::Arc::new);
        match e {
            Expr::Ident(n, _) if n == "tt" && lookup(scope, n).is_none() => Ok(Goal::Tt),
            Expr::Ident(n, _) if n == "ff" && lookup(scope, n).is_none() => Ok(Goal::Ff),
            Expr::Bin(BinOp::And, l, r, _) => Ok(Goal::And(sub(l, scope)?, sub(r, scope)?)),
            Expr::Bin(BinOp::Or, l, r, _) => Ok(Goal::Or(sub(l, scope)?, sub(r, scope)?)),
            Expr::Bin(BinOp::Eq, l, r, _) => Ok(Goal::Eq(self.term(l, scope)?, self.term(r, scope)?)),
            Expr::Bin(BinOp::Imp, l, r, pos) => {
                self.require(Mode::Hh, "`=>`", *pos)?;
                Ok(Goal::ImpI(self.atom(l, scope)?, sub(r, scope)?))
            }
            Expr::Bin(BinOp::LImp, l, r, pos) => {
                self.require(Mode::Linear, "`-o`", *pos)?;
                Ok(Goal::ImpL(self.atom(l, scope)?, sub(r, scope)?))
            }
            Expr::Bang(g, pos) => {
                self.require(Mode::Linear, "`!`", *pos)?;
                Ok(Goal::Bang(sub(g, scope)?))
            }
            Expr::Bin(BinOp::Pair, _, _, pos) => Err(SyntaxError::invalid(*pos, "`<c>` outside a certificate")),
            Expr::App(h, args) if matches!(&**h, Expr::Ident(n, _) if (n == "some" || n == "pi") && lookup(scope, n).is_none()) => {
                let Expr::Ident(q, pos) = &**h else { unreachable!() };
                let [Expr::Lam(x, body, _)] = args.as_slice() else {
                    return Err(SyntaxError::invalid(*pos, format!("`{q}` expects a binder `{q} X\\ G`")));
                };
                if q == "pi" {
                    self.require(Mode::Hh, "`pi`", *pos)?;
                }
                scope.push(x.clone());
                let b = self.goal(body, scope);
                scope.pop();
                let b = b?;
                Ok(if q == "some" { Goal::some(b) } else { Goal::all(b) })
            }
            _ => Ok(Goal::Atom(self.atom(e, scope)?)),
        }
    }
}

/// Records the predicate of every implication antecedent.
fn antecedents(e: &Expr, out: &mut Vec<(String, usize, Pos)>) {
    match e {
        Expr::Bin(op, l, r, _) => {
            if matches!(op, BinOp::Imp | BinOp::LImp) {
                if let Some((n, k)) = l.head_ident() {
                    out.push((n.to_string(), k, l.pos()));
                }
            }
            antecedents(l, out);
            antecedents(r, out);
        }
        Expr::App(h, args) => {
            antecedents(h, out);
            for a in args {
                antecedents(a, out);
            }
        }
        Expr::Lam(_, b, _) | Expr::Bang(b, _) => antecedents(b, out),
        _ => {}
    }
}

pub fn parse_program(src: &str) -> Result<Program, SyntaxError> {
    parse_program_as(src, None)
}

/// Parses a program, optionally overriding its declared mode.
pub fn parse_program_as(src: &str, mode_override: Option<Mode>) -> Result<Program, SyntaxError> {
    let items = parse_items(src)?;
    let mut mode = Mode::default();
    let mut ctors = BTreeMap::new();
    let mut axioms = BTreeMap::new();
    let mut arities: BTreeMap<String, usize> = BTreeMap::new();
    let mut order: Vec<String> = Vec::new();
    let mut weight_items = Vec::new();

    let mut declare = |name: &str, k: usize, pos: Pos, arities: &mut BTreeMap<String, usize>| {
        match arities.get(name) {
            Some(&a) if a != k => return Err(arity_error(pos, name, a, k)),
            Some(_) => {}
            None => {
                arities.insert(name.to_string(), k);
                order.push(name.to_string());
            }
        }
        Ok(())
    };

    for item in &items {
        match item {
            Item::Ctor(name, k, pos) => {
                if KEYWORDS.contains(&name.as_str()) || cert_arity(name).is_some() {
                    return Err(SyntaxError::invalid(*pos, format!("`{name}` is reserved")));
                }
                if let Some(prev) = ctors.insert(name.clone(), *k) {
                    if prev != *k {
                        return Err(arity_error(*pos, name, prev, *k));
                    }
                }
            }
            Item::Mode(m, pos) => mode = m.parse().map_err(|e: String| SyntaxError::invalid(*pos, e))?,
            Item::Axiom(name, k, pos) => {
                declare(name, *k, *pos, &mut arities)?;
                axioms.insert(name.clone(), *k);
            }
            Item::Weights(name, ws, pos) => {
                if weight_items.iter().any(|(n, _, _): &(String, _, _)| n == name) {
                    return Err(SyntaxError::DuplicateWeights(name.clone()));
                }
                weight_items.push((name.clone(), ws.clone(), *pos));
            }
            Item::Clause { head, body, pos } => {
                let Some((name, k)) = head.head_ident() else {
                    return Err(SyntaxError::invalid(*pos, "a clause head must be a predicate applied to terms"));
                };
                if KEYWORDS.contains(&name) {
                    return Err(SyntaxError::invalid(*pos, format!("`{name}` is reserved")));
                }
                declare(name, k, *pos, &mut arities)?;
                let mut ants = Vec::new();
                if let Some(b) = body {
                    antecedents(b, &mut ants);
                }
                for (n, k, p) in ants {
                    declare(&n, k, p, &mut arities)?;
                }
            }
            Item::Prop { gen, when, then, .. } => {
                let mut ants = Vec::new();
                for g in [Some(gen), when.as_ref(), Some(then)].into_iter().flatten() {
                    antecedents(g, &mut ants);
                }
                for (n, k, p) in ants {
                    declare(&n, k, p, &mut arities)?;
                }
            }
        }
    }
    if let Some(m) = mode_override {
        mode = m;
    }
    if let Some(name) = arities.keys().find(|n| ctors.contains_key(*n)) {
        return Err(SyntaxError::invalid(
            Pos { line: 1, col: 1 },
            format!("`{name}` is declared both as a constructor and as a predicate"),
        ));
    }

    let env = Env {
        ctors: &ctors,
        preds: &arities,
        mode,
    };
    let mut clauses: HashMap<String, Vec<Clause>> = HashMap::new();
    let mut props = Vec::new();
    for item in &items {
        match item {
            Item::Clause { head, body, .. } => {
                let vars = vars_of(std::iter::once(head).chain(body.iter()));
                let mut scope = vars.clone();
                let h = env.atom(head, &mut scope)?;
                let b = match body {
                    Some(b) => env.goal(b, &mut scope)?,
                    None => Goal::Tt,
                };
                let name = head.head_ident().expect("checked in the first pass").0;
                clauses.entry(name.to_string()).or_default().push(Clause { vars, head: h, body: b });
            }
            Item::Prop { name, gen, when, then, pos } => {
                if props.iter().any(|p: &PropertySpec| &p.name == name) {
                    return Err(SyntaxError::invalid(*pos, format!("duplicate property `{name}`")));
                }
                let vars = vars_of([Some(gen), when.as_ref(), Some(then)].into_iter().flatten());
                let mut scope = vars.clone();
                let gen = env.goal(gen, &mut scope)?;
                let when = when.as_ref().map(|w| env.goal(w, &mut scope)).transpose()?;
                let then = env.goal(then, &mut scope)?;
                props.push(PropertySpec {
                    name: name.clone(),
                    vars,
                    gen,
                    when,
                    then,
                });
            }
            _ => {}
        }
    }

    let mut preds = BTreeMap::new();
    for name in &order {
        let arity = arities[name];
        let cs = clauses.remove(name).unwrap_or_default();
        let (completed, disjuncts) = complete(name, arity, &cs);
        preds.insert(
            name.clone(),
            PredDef {
                name: name.clone(),
                arity,
                clauses: cs,
                completed,
                disjuncts,
            },
        );
    }

    let mut weights = BTreeMap::new();
    for (name, ws, pos) in weight_items {
        let Some(def) = preds.get(&name) else {
            return Err(SyntaxError::UnknownPredicate {
                line: pos.line,
                col: pos.col,
                name,
            });
        };
        let ws = ws
            .iter()
            .map(|w| match w {
                Expr::Int(n, _) if *n >= 0 && *n <= u32::MAX as i64 => Ok(*n as u32),
                other => Err(SyntaxError::invalid(other.pos(), "weights must be natural numbers")),
            })
            .collect::<Result<Vec<u32>, _>>()?;
        if ws.len() != def.disjuncts {
            return Err(SyntaxError::WeightsLength {
                name,
                expected: def.disjuncts,
                found: ws.len(),
            });
        }
        weights.insert(name, ws);
    }

    Ok(Program {
        mode,
        ctors,
        preds,
        axioms,
        weights,
        props,
    })
}

fn env_of(prog: &Program) -> (BTreeMap<String, usize>, Mode) {
    (prog.preds.iter().map(|(n, d)| (n.clone(), d.arity)).collect(), prog.mode)
}

/// Parses a query; capitalized identifiers become its free variables.
pub fn parse_goal(src: &str, prog: &Program) -> Result<Query, SyntaxError> {
    let e = parse_expr(src)?;
    let (preds, mode) = env_of(prog);
    let env = Env {
        ctors: &prog.ctors,
        preds: &preds,
        mode,
    };
    let vars = vars_of([&e]);
    let mut scope = vars.clone();
    let goal = env.goal(&e, &mut scope)?;
    Ok(Query { vars, goal })
}

/// Parses an object term; its free variables are returned and bound
/// outermost-first.
pub fn parse_term(src: &str, prog: &Program) -> Result<(Vec<String>, Term), SyntaxError> {
    let e = parse_expr(src)?;
    let (preds, mode) = env_of(prog);
    let env = Env {
        ctors: &prog.ctors,
        preds: &preds,
        mode,
    };
    let vars = vars_of([&e]);
    let mut scope = vars.clone();
    let t = env.term(&e, &mut scope)?;
    Ok((vars, t))
}

struct CertEnv<'a> {
    env: Env<'a>,
    holes: HashMap<String, Term>,
}

impl CertEnv<'_> {
    fn cert(&mut self, e: &Expr, store: &mut Store, scope: &mut Vec<String>) -> Result<Term, SyntaxError> {
        match e {
            Expr::Bin(BinOp::Pair, l, r, _) => {
                let l = self.cert(l, store, scope)?;
                let r = self.cert(r, store, scope)?;
                Ok(Term::call(PAIR, [l, r]))
            }
            Expr::Wild(..) => Ok(store.fresh_meta(0)),
            Expr::Var(n, _) if lookup(scope, n).is_none() => {
                Ok(self.holes.entry(n.clone()).or_insert_with(|| store.fresh_meta(0)).clone())
            }
            Expr::List(items, _) => {
                let items = items.iter().map(|i| self.cert(i, store, scope)).collect::<Result<Vec<_>, _>>()?;
                Ok(items
                    .into_iter()
                    .rev()
                    .fold(Term::cnst(CERT_NIL), |acc, x| Term::call(CERT_CONS, [x, acc])))
            }
            Expr::Ident(n, pos) if lookup(scope, n).is_none() && cert_arity(n).is_some() => {
                self.cert_app(n, &[], *pos, store, scope)
            }
            Expr::App(h, args) => match &**h {
                Expr::Ident(n, pos) if lookup(scope, n).is_none() && cert_arity(n).is_some() => {
                    self.cert_app(n, args, *pos, store, scope)
                }
                _ => self.object(e, store, scope),
            },
            Expr::Lam(x, body, _) => {
                scope.push(x.clone());
                let b = self.cert(body, store, scope);
                scope.pop();
                Ok(Term::abs(b?))
            }
            _ => self.object(e, store, scope),
        }
    }

    fn cert_app(
        &mut self,
        name: &str,
        args: &[Expr],
        pos: Pos,
        store: &mut Store,
        scope: &mut Vec<String>,
    ) -> Result<Term, SyntaxError> {
        let arity = cert_arity(name).expect("caller checked");
        let mut args = args.iter().map(|a| self.cert(a, store, scope)).collect::<Result<Vec<_>, _>>()?;
        if name == "collect" && args.len() == 1 {
            args.push(Term::cnst(CERT_NIL));
        }
        if args.len() != arity {
            return Err(arity_error(pos, name, arity, args.len()));
        }
        Ok(Term::call(name, args))
    }

    /// Object terms inside certificates (witnesses, universes); holes and
    /// named variables become metavariables.
    fn object(&mut self, e: &Expr, store: &mut Store, scope: &mut Vec<String>) -> Result<Term, SyntaxError> {
        match e {
            Expr::Wild(..) | Expr::List(..) => self.cert(e, store, scope),
            Expr::Var(n, _) if lookup(scope, n).is_none() => self.cert(e, store, scope),
            Expr::Ident(n, pos) if lookup(scope, n).is_none() => {
                if self.env.ctors.contains_key(n) || self.env.preds.contains_key(n) {
                    self.env.constant(n, 0, *pos)
                } else {
                    Err(SyntaxError::UnknownCert {
                        line: pos.line,
                        col: pos.col,
                        name: n.clone(),
                    })
                }
            }
            Expr::App(h, args) => {
                let head = match &**h {
                    Expr::Ident(n, pos) if lookup(scope, n).is_none() => {
                        if !self.env.ctors.contains_key(n) && !self.env.preds.contains_key(n) {
                            return Err(SyntaxError::UnknownCert {
                                line: pos.line,
                                col: pos.col,
                                name: n.clone(),
                            });
                        }
                        self.env.constant(n, args.len(), *pos)?
                    }
                    other => self.object(other, store, scope)?,
                };
                let args = args.iter().map(|a| self.object(a, store, scope)).collect::<Result<Vec<_>, _>>()?;
                Ok(Term::apps(head, args))
            }
            Expr::Bin(BinOp::Cons, l, r, _) => {
                let l = self.object(l, store, scope)?;
                let r = self.object(r, store, scope)?;
                Ok(Term::cons(l, r))
            }
            Expr::Lam(..) => self.cert(e, store, scope),
            _ => self.env.term(e, scope),
        }
    }
}

/// Parses a certificate. Holes (`_`, or capitalized names, equal names
/// sharing one hole) become metavariables of `store` at level 0.
pub fn parse_cert(src: &str, prog: &Program, store: &mut Store) -> Result<Term, SyntaxError> {
    let e = parse_expr(src)?;
    let (preds, mode) = env_of(prog);
    let mut ce = CertEnv {
        env: Env {
            ctors: &prog.ctors,
            preds: &preds,
            mode,
        },
        holes: HashMap::new(),
    };
    ce.cert(&e, store, &mut Vec::new())
}
