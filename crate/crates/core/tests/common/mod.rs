//! Oracles and helpers shared by the integration tests and the acceptance
//! suite. The enumerators here are written directly from the clause sets of
//! the corpus generators and never call the engine.
#![allow(dead_code)]

use pbt_core::corpus;
use pbt_core::engine::{EngineError, Frame, ResourceContext, Search, SearchOptions, Solution};
use pbt_core::fpclib::StdFpc;
use pbt_core::kernel::{check, ll_check, Fpc};
use pbt_core::syntax::{parse_goal, Program};
use pbt_core::terms::{MetaId, Store, Term};
use pbt_core::unify::unify;
use std::collections::{HashMap, HashSet};

pub fn load(file: &str) -> Program {
    corpus::entry(file).expect("bundled file").load().expect("corpus parses")
}

fn z() -> Term {
    Term::cnst("z")
}
fn s(t: Term) -> Term {
    Term::call("s", [t])
}
fn nil() -> Term {
    Term::cnst("nil")
}

/// `isnat` proofs of height at most `h`: one decide step per constructor.
pub fn nats_by_height(h: u32) -> Vec<Term> {
    if h == 0 {
        return vec![];
    }
    let mut out = vec![z()];
    out.extend(nats_by_height(h - 1).into_iter().map(s));
    out
}

/// `nlist` proofs of height at most `h`: `nlist (X :: L)` proves `isnat X`
/// and `nlist L` side by side, one level down.
pub fn nlists_by_height(h: u32) -> Vec<Term> {
    if h == 0 {
        return vec![];
    }
    let mut out = vec![nil()];
    let nats = nats_by_height(h - 1);
    let tails = nlists_by_height(h - 1);
    for x in &nats {
        for l in &tails {
            out.push(Term::cons(x.clone(), l.clone()));
        }
    }
    out
}

/// `isnat` proofs with exactly `n` decide steps.
fn nats_of_size(n: u32) -> Vec<Term> {
    match n {
        0 => vec![],
        1 => vec![z()],
        n => nats_of_size(n - 1).into_iter().map(s).collect(),
    }
}

fn nlists_of_size(n: u32) -> Vec<Term> {
    match n {
        0 => vec![],
        1 => vec![nil()],
        n => {
            let mut out = Vec::new();
            for a in 1..n - 1 {
                for x in nats_of_size(a) {
                    for l in nlists_of_size(n - 1 - a) {
                        out.push(Term::cons(x.clone(), l));
                    }
                }
            }
            out
        }
    }
}

/// `nlist` proofs with at most `n` decide steps.
pub fn nlists_by_size(n: u32) -> Vec<Term> {
    (1..=n).flat_map(nlists_of_size).collect()
}

fn app(a: Term, b: Term) -> Term {
    Term::call("app", [a, b])
}
fn lam(body: Term) -> Term {
    Term::call("lam", [Term::abs(body)])
}

/// Untyped `is_exp` proofs of height at most `h` with `scope` variables
/// bound by hypotheses; a variable costs one step (the hypothesis).
pub fn exps_by_height(h: u32, scope: u32) -> Vec<Term> {
    if h == 0 {
        return vec![];
    }
    let mut out: Vec<Term> = (0..scope).map(Term::Bound).collect();
    let smaller = exps_by_height(h - 1, scope);
    for a in &smaller {
        for b in &smaller {
            out.push(app(a.clone(), b.clone()));
        }
    }
    out.extend(exps_by_height(h - 1, scope + 1).into_iter().map(lam));
    out
}

fn exps_of_size(n: u32, scope: u32) -> Vec<Term> {
    if n == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    if n == 1 {
        out.extend((0..scope).map(Term::Bound));
    }
    for a in 1..n.saturating_sub(1) {
        for f in exps_of_size(a, scope) {
            for x in exps_of_size(n - 1 - a, scope) {
                out.push(app(f.clone(), x));
            }
        }
    }
    out.extend(exps_of_size(n - 1, scope + 1).into_iter().map(lam));
    out
}

pub fn exps_by_size(n: u32) -> Vec<Term> {
    (1..=n).flat_map(|k| exps_of_size(k, 0)).collect()
}

/// The values of `var` over every solution of `goal` under `cert`.
pub fn check_values(prog: &Program, goal: &str, cert: &str, var: &str) -> Vec<Term> {
    let query = parse_goal(goal, prog).expect("goal parses");
    check(&StdFpc, prog, cert, &[], &query, &SearchOptions::default())
        .expect("certificate parses")
        .map(|s| s.expect("search succeeds").get(var).expect("bound").clone())
        .collect()
}

pub fn as_set(ts: &[Term]) -> HashSet<Term> {
    ts.iter().cloned().collect()
}

/// Solutions of `goal` under `cert` and `fpc`, at most `limit`.
pub fn check_solutions(
    fpc: &dyn Fpc,
    prog: &Program,
    goal: &str,
    cert: &str,
    linear: bool,
    limit: usize,
    fuel: u64,
) -> Result<Vec<Solution>, EngineError> {
    let query = parse_goal(goal, prog).expect("goal parses");
    let opts = SearchOptions { fuel, seed: 0 };
    let sols = if linear {
        ll_check(fpc, prog, cert, ResourceContext::new(), &query, &opts)
    } else {
        check(fpc, prog, cert, &[], &query, &opts)
    }
    .expect("certificate parses");
    sols.take(limit).collect()
}

fn rename(t: &Term, map: &mut HashMap<MetaId, Term>, store: &mut Store) -> Term {
    match t {
        Term::Meta(m) => map.entry(*m).or_insert_with(|| store.fresh_meta(0)).clone(),
        Term::App(f, a) => Term::app(rename(f, map, store), rename(a, map, store)),
        Term::Abs(b) => Term::abs(rename(b, map, store)),
        _ => t.clone(),
    }
}

/// True iff unrestricted search proves `goal` instantiated by `bindings`
/// (whose free metavariables stay free).
pub fn solve_accepts(prog: &Program, goal: &str, bindings: &[(String, Term)], linear: bool, fuel: u64) -> Result<bool, EngineError> {
    let query = parse_goal(goal, prog).expect("goal parses");
    let mut search = Search::new(prog, None, &SearchOptions { fuel, seed: 0 });
    let metas = search.fresh_vars(&query.vars);
    let mut renaming = HashMap::new();
    for (var, t) in bindings {
        let i = query.vars.iter().position(|v| v == var).expect("query variable");
        let t = rename(t, &mut renaming, &mut search.store);
        if !unify(&mut search.store, &metas[i], &t).expect("first-order bindings") {
            return Ok(false);
        }
    }
    let goal = query.goal.instantiate(&metas);
    let ctx = if linear {
        ResourceContext::new()
    } else {
        ResourceContext::unbounded(&[])
    };
    search.start(vec![Frame::prove(goal, None)], ctx);
    search.next_solution()
}

/// Resolved bindings rendered for set comparison, with metavariables
/// numbered by first occurrence so separate searches compare equal.
pub fn render(sol: &Solution) -> String {
    let text = sol.bindings.iter().map(|(v, t)| format!("{v}={t}")).collect::<Vec<_>>().join(";");
    let mut names: HashMap<String, usize> = HashMap::new();
    let mut out = String::new();
    let mut rest = text.as_str();
    while let Some(at) = rest.find("_G") {
        out.push_str(&rest[..at]);
        let digits = rest[at + 2..].bytes().take_while(u8::is_ascii_digit).count();
        let name = &rest[at..at + 2 + digits];
        let next = names.len();
        let n = *names.entry(name.to_string()).or_insert(next);
        out.push_str(&format!("_M{n}"));
        rest = &rest[at + 2 + digits..];
    }
    out.push_str(rest);
    out
}
