//! Higher-order pattern unification with the occurs-check always on.
//!
//! A flexible term `M a1 .. an` is a pattern when the `ai` are distinct
//! eigenvariables. Flex-rigid and flex-flex problems over patterns are solved
//! by inversion with pruning; anything else that needs solving is reported as
//! a [`UnifyError::NonPattern`].

use crate::terms::{instantiate, Eigen, MetaId, Store, Term, LOCAL_LEVEL};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum UnifyError {
    #[error("unification problem outside the pattern fragment: {0}")]
    NonPattern(String),
}

type Outcome = Result<bool, UnifyError>;

/// Unifies `a` and `b`. On `Ok(false)` or `Err` the store is unchanged.
pub fn unify(store: &mut Store, a: &Term, b: &Term) -> Outcome {
    let mark = store.mark();
    let r = go(store, a, b);
    if !matches!(r, Ok(true)) {
        store.undo(mark);
    }
    r
}

fn go(store: &mut Store, a: &Term, b: &Term) -> Outcome {
    let a = store.whnf(a);
    let b = store.whnf(b);
    match (&a, &b) {
        (Term::Abs(x), Term::Abs(y)) => {
            let c = store.fresh_eigen(LOCAL_LEVEL);
            go(store, &instantiate(x, &c), &instantiate(y, &c))
        }
        (Term::Abs(x), _) => {
            let c = store.fresh_eigen(LOCAL_LEVEL);
            go(store, &instantiate(x, &c), &Term::app(b.clone(), c))
        }
        (_, Term::Abs(y)) => {
            let c = store.fresh_eigen(LOCAL_LEVEL);
            go(store, &Term::app(a.clone(), c.clone()), &instantiate(y, &c))
        }
        _ => {
            let (ha, aa) = a.spine();
            let (hb, ab) = b.spine();
            match (ha, hb) {
                (Term::Meta(m), Term::Meta(n)) if m == n => flex_same(store, *m, &aa, &ab, &a, &b),
                (Term::Meta(m), _) => flex_other(store, *m, &aa, &b, &a),
                (_, Term::Meta(n)) => flex_other(store, *n, &ab, &a, &b),
                _ => {
                    if !rigid_heads_equal(ha, hb) || aa.len() != ab.len() {
                        return Ok(false);
                    }
                    for (x, y) in aa.iter().zip(ab.iter()) {
                        if !go(store, x, y)? {
                            return Ok(false);
                        }
                    }
                    Ok(true)
                }
            }
        }
    }
}

fn rigid_heads_equal(a: &Term, b: &Term) -> bool {
    match (a, b) {
        (Term::Const(x), Term::Const(y)) => x == y,
        (Term::Int(x), Term::Int(y)) => x == y,
        (Term::Eigen(x), Term::Eigen(y)) => x.id == y.id,
        _ => false,
    }
}

/// The arguments as distinct eigenvariables, if they form a pattern.
fn pattern_args(store: &Store, args: &[&Term]) -> Option<Vec<Eigen>> {
    let mut out: Vec<Eigen> = Vec::with_capacity(args.len());
    for a in args {
        match store.whnf(a) {
            Term::Eigen(e) if !out.iter().any(|o| o.id == e.id) => out.push(e),
            _ => return None,
        }
    }
    Some(out)
}

fn non_pattern(store: &Store, a: &Term, b: &Term) -> UnifyError {
    UnifyError::NonPattern(format!("{} = {}", store.resolve(a), store.resolve(b)))
}

fn wrap_abs(body: Term, n: usize) -> Term {
    (0..n).fold(body, |t, _| Term::abs(t))
}

fn bound_of(pos: usize, n: usize) -> Term {
    Term::Bound((n - 1 - pos) as u32)
}

/// `M xs = M ys`: keep the argument positions where both sides agree.
fn flex_same(
    store: &mut Store,
    m: MetaId,
    xs: &[&Term],
    ys: &[&Term],
    a: &Term,
    b: &Term,
) -> Outcome {
    let (Some(xs), Some(ys)) = (pattern_args(store, xs), pattern_args(store, ys)) else {
        return Err(non_pattern(store, a, b));
    };
    if xs.len() != ys.len() {
        return Ok(false);
    }
    if xs.iter().zip(&ys).all(|(x, y)| x.id == y.id) {
        return Ok(true);
    }
    let n = xs.len();
    let h = store.fresh_meta(store.level(m));
    let kept = (0..n).filter(|&i| xs[i].id == ys[i].id).map(|i| bound_of(i, n));
    store.bind(m, wrap_abs(Term::apps(h, kept), n));
    Ok(true)
}

/// `M xs = t` where `t` is not headed by `M`.
fn flex_other(store: &mut Store, m: MetaId, args: &[&Term], t: &Term, flex: &Term) -> Outcome {
    let Some(mut vars) = pattern_args(store, args) else {
        return Err(non_pattern(store, flex, t));
    };
    let level = store.level(m);
    let n = vars.len();
    match invert(store, m, level, &mut vars, t)? {
        Some(body) => {
            store.bind(m, wrap_abs(body, n));
            Ok(true)
        }
        None => Ok(false),
    }
}

/// Rewrites `t` so that it can be the body of `M`'s binding under `vars`
/// abstractions: each `vars[i]` becomes a bound variable, metavariables are
/// pruned or lowered to `level`. `None` means no solution exists.
fn invert(
    store: &mut Store,
    m: MetaId,
    level: u32,
    vars: &mut Vec<Eigen>,
    t: &Term,
) -> Result<Option<Term>, UnifyError> {
    // A ground binding cannot mention `m`; it can be shared as is unless it
    // has eigenvariables the pattern must abstract or that are out of scope.
    if let Term::Meta(n) = t {
        if let Some(eigens) = store.ground_level(*n) {
            if eigens.is_none() || (vars.is_empty() && eigens <= Some(level)) {
                return Ok(Some(t.clone()));
            }
        }
    }
    let t = store.whnf(t);
    match &t {
        Term::Const(_) | Term::Int(_) => Ok(Some(t)),
        Term::Bound(_) => unreachable!("open term reached inversion"),
        Term::Eigen(e) => Ok(invert_eigen(vars, level, e)),
        Term::Abs(body) => {
            let c = store.fresh_eigen(LOCAL_LEVEL);
            let Term::Eigen(ce) = c else { unreachable!() };
            vars.push(ce);
            let r = invert(store, m, level, vars, &instantiate(body, &c));
            vars.pop();
            Ok(r?.map(Term::abs))
        }
        Term::Meta(_) | Term::App(..) => {
            let (head, args) = t.spine();
            match head {
                Term::Meta(n) => invert_flex(store, m, level, vars, *n, &args, &t),
                _ => {
                    let head = match head {
                        Term::Eigen(e) => match invert_eigen(vars, level, e) {
                            Some(h) => h,
                            None => return Ok(None),
                        },
                        other => other.clone(),
                    };
                    let mut out = head;
                    for a in args {
                        match invert(store, m, level, vars, a)? {
                            Some(a) => out = Term::app(out, a),
                            None => return Ok(None),
                        }
                    }
                    Ok(Some(out))
                }
            }
        }
    }
}

fn invert_eigen(vars: &[Eigen], level: u32, e: &Eigen) -> Option<Term> {
    match vars.iter().rposition(|v| v.id == e.id) {
        Some(pos) => Some(bound_of(pos, vars.len())),
        None if e.level <= level => Some(Term::Eigen(*e)),
        None => None,
    }
}

fn invert_flex(
    store: &mut Store,
    m: MetaId,
    level: u32,
    vars: &mut Vec<Eigen>,
    n: MetaId,
    args: &[&Term],
    whole: &Term,
) -> Result<Option<Term>, UnifyError> {
    if n == m {
        return Ok(None);
    }
    let n_level = store.level(n);
    let Some(ys) = pattern_args(store, args) else {
        // Outside the fragment: acceptable only when nothing needs pruning
        // or raising and every argument inverts as is.
        if n_level > level {
            return Err(UnifyError::NonPattern(format!("cannot prune {}", store.resolve(whole))));
        }
        let mut out = Term::Meta(n);
        for a in args {
            match invert(store, m, level, vars, a)? {
                Some(a) => out = Term::app(out, a),
                None => {
                    return Err(UnifyError::NonPattern(format!(
                        "cannot prune {}",
                        store.resolve(whole)
                    )))
                }
            }
        }
        return Ok(Some(out));
    };
    // Arguments of `n` that `m`'s body can refer to survive; the others are
    // pruned. Eigenvariables of `m`'s pattern that `n` may mention but `m`
    // cannot see directly are passed to `n`'s replacement explicitly.
    let keep: Vec<bool> = ys
        .iter()
        .map(|y| vars.iter().any(|v| v.id == y.id) || y.level <= level)
        .collect();
    let extra: Vec<Eigen> = vars
        .iter()
        .filter(|v| v.level > level && v.level <= n_level && !ys.iter().any(|y| y.id == v.id))
        .copied()
        .collect();
    let k = ys.len();
    let head = if keep.iter().all(|x| *x) && extra.is_empty() {
        if n_level > level {
            store.set_level(n, level);
        }
        Term::Meta(n)
    } else {
        let fresh = store.fresh_meta(n_level.min(level));
        let kept = (0..k).filter(|&i| keep[i]).map(|i| bound_of(i, k));
        let raised = extra.iter().map(|e| Term::Eigen(*e));
        store.bind(n, wrap_abs(Term::apps(fresh.clone(), kept.chain(raised)), k));
        fresh
    };
    let mut out = head;
    for y in ys.iter().zip(&keep).filter(|(_, kept)| **kept).map(|(y, _)| y).chain(&extra) {
        out = Term::app(out, invert_eigen(vars, level, y).expect("kept argument inverts"));
    }
    Ok(Some(out))
}

/// α-equivalence of resolved terms (de Bruijn makes it structural).
pub fn alpha_eq(store: &Store, a: &Term, b: &Term) -> bool {
    store.resolve(a) == store.resolve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::terms::Symbol;
    use proptest::prelude::*;

    fn z() -> Term {
        Term::cnst("z")
    }
    fn s(t: Term) -> Term {
        Term::call("s", [t])
    }
    fn meta_id(t: &Term) -> MetaId {
        match t {
            Term::Meta(m) => *m,
            _ => panic!("not a meta"),
        }
    }

    #[test]
    fn first_order_binding() {
        let mut st = Store::new();
        let x = st.fresh_meta(0);
        assert_eq!(unify(&mut st, &x, &s(z())), Ok(true));
        assert_eq!(st.resolve(&x), s(z()));
    }

    #[test]
    fn occurs_check_fails_and_leaves_store() {
        let mut st = Store::new();
        let x = st.fresh_meta(0);
        let before = st.mark();
        assert_eq!(unify(&mut st, &s(x.clone()), &x), Ok(false));
        assert_eq!(st.mark(), before);
        assert!(st.binding(meta_id(&x)).is_none());
    }

    #[test]
    fn pattern_binding_for_local_variable() {
        // (M x) = x with x a parameter above M's level gives M = x\ x.
        let mut st = Store::new();
        let m = st.fresh_meta(0);
        let x = st.fresh_eigen(1);
        assert_eq!(unify(&mut st, &Term::app(m.clone(), x.clone()), &x), Ok(true));
        let bound = st.resolve(&m);
        assert_eq!(bound, Term::abs(Term::Bound(0)));
        // Oracle: the binding makes both sides equal.
        assert!(alpha_eq(&st, &Term::app(m, x.clone()), &x));
    }

    #[test]
    fn scope_violation_fails() {
        let mut st = Store::new();
        let m = st.fresh_meta(0);
        let x = st.fresh_eigen(1);
        assert_eq!(unify(&mut st, &m, &x), Ok(false));
    }

    #[test]
    fn raising_lowers_inner_metas() {
        // M x = app A B with A, B at level 1: A and B are raised over x, so
        // A can still become x afterwards.
        let mut st = Store::new();
        let m = st.fresh_meta(0);
        let x = st.fresh_eigen(1);
        let a = st.fresh_meta(1);
        let b = st.fresh_meta(1);
        let lhs = Term::app(m.clone(), x.clone());
        let rhs = Term::call("app", [a.clone(), b.clone()]);
        assert_eq!(unify(&mut st, &lhs, &rhs), Ok(true));
        assert!(alpha_eq(&st, &lhs, &rhs));
        assert_eq!(unify(&mut st, &a, &x), Ok(true));
        assert_eq!(unify(&mut st, &b, &Term::cnst("unit")), Ok(true));
        let lam = Term::abs(Term::call("app", [Term::Bound(0), Term::cnst("unit")]));
        assert_eq!(st.resolve(&m), lam);
        st.audit().unwrap();
    }

    #[test]
    fn raising_keeps_shared_dependency() {
        // M x = N with N at level 1: N may still mention x, so N becomes H x
        // for a fresh H visible to M.
        let mut st = Store::new();
        let m = st.fresh_meta(0);
        let x = st.fresh_eigen(1);
        let n = st.fresh_meta(1);
        let lhs = Term::app(m.clone(), x.clone());
        assert_eq!(unify(&mut st, &lhs, &n), Ok(true));
        assert!(alpha_eq(&st, &lhs, &n));
        let (h, args) = match st.resolve(&n) {
            t @ Term::App(..) => {
                let (h, a) = t.spine();
                (h.clone(), a.into_iter().cloned().collect::<Vec<_>>())
            }
            other => panic!("expected an application, got {other:?}"),
        };
        assert_eq!(args, vec![x]);
        assert_eq!(st.level(meta_id(&h)), 0);
        st.audit().unwrap();
    }

    #[test]
    fn pruning_drops_invisible_dependency() {
        // M x = N y with y invisible to M and not among its arguments.
        let mut st = Store::new();
        let m = st.fresh_meta(0);
        let x = st.fresh_eigen(1);
        let y = st.fresh_eigen(1);
        let n = st.fresh_meta(1);
        let lhs = Term::app(m.clone(), x.clone());
        let rhs = Term::app(n.clone(), y.clone());
        assert_eq!(unify(&mut st, &lhs, &rhs), Ok(true));
        assert!(alpha_eq(&st, &lhs, &rhs));
        assert!(!st.resolve(&rhs).to_string().contains(&y.to_string()));
        st.audit().unwrap();
    }

    #[test]
    fn flex_flex_same_meta_prunes_disagreeing_positions() {
        let mut st = Store::new();
        let m = st.fresh_meta(0);
        let x = st.fresh_eigen(1);
        let y = st.fresh_eigen(1);
        let l = Term::apps(m.clone(), [x.clone(), y.clone()]);
        let r = Term::apps(m.clone(), [y.clone(), x.clone()]);
        assert_eq!(unify(&mut st, &l, &r), Ok(true));
        assert!(alpha_eq(&st, &l, &r));
    }

    #[test]
    fn abstractions_unify_under_binders() {
        let mut st = Store::new();
        let m = st.fresh_meta(0);
        // lam x\ app M x  =  lam x\ app (lam y\ y) x
        let idf = Term::call("lam", [Term::abs(Term::Bound(0))]);
        let l = Term::abs(Term::call("app", [m.clone(), Term::Bound(0)]));
        let r = Term::abs(Term::call("app", [idf.clone(), Term::Bound(0)]));
        assert_eq!(unify(&mut st, &l, &r), Ok(true));
        assert_eq!(st.resolve(&m), idf);
        // lam x\ app M x  =  lam x\ app x x  fails: M cannot capture x.
        let mut st = Store::new();
        let m = st.fresh_meta(0);
        let l = Term::abs(Term::call("app", [m, Term::Bound(0)]));
        let r = Term::abs(Term::call("app", [Term::Bound(0), Term::Bound(0)]));
        assert_eq!(unify(&mut st, &l, &r), Ok(false));
    }

    #[test]
    fn non_pattern_is_reported() {
        let mut st = Store::new();
        let m = st.fresh_meta(0);
        let n = st.fresh_meta(0);
        let r = unify(&mut st, &Term::app(m, n), &z());
        assert!(matches!(r, Err(UnifyError::NonPattern(_))));
    }

    #[test]
    fn ints_unify_by_value() {
        let mut st = Store::new();
        assert_eq!(unify(&mut st, &Term::Int(-1), &Term::Int(-1)), Ok(true));
        assert_eq!(unify(&mut st, &Term::Int(0), &Term::Int(1)), Ok(false));
    }

    /// First-order terms over z/s/pair with a few metavariables.
    fn arb_term(metas: u32) -> impl Strategy<Value = Term> {
        let leaf = prop_oneof![
            Just(Term::cnst("z")),
            (0..metas).prop_map(|i| Term::Meta(MetaId(i))),
        ];
        leaf.prop_recursive(4, 24, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| Term::call("s", [t])),
                (inner.clone(), inner).prop_map(|(a, b)| Term::call("pair", [a, b])),
            ]
        })
    }

    fn store_with(metas: u32) -> Store {
        let mut st = Store::new();
        for _ in 0..metas {
            st.fresh_meta(0);
        }
        st
    }

    proptest! {
        #[test]
        fn unify_is_sound(a in arb_term(3), b in arb_term(3)) {
            let mut st = store_with(3);
            if unify(&mut st, &a, &b).unwrap() {
                prop_assert!(alpha_eq(&st, &a, &b));
                // Re-unifying resolved results is a no-op success.
                let (ra, rb) = (st.resolve(&a), st.resolve(&b));
                let m = st.mark();
                prop_assert_eq!(unify(&mut st, &ra, &rb), Ok(true));
                prop_assert_eq!(st.mark(), m);
                st.audit().unwrap();
            }
        }

        #[test]
        fn unify_then_undo_restores(a in arb_term(3), b in arb_term(3)) {
            let mut st = store_with(3);
            let m = st.mark();
            let _ = unify(&mut st, &a, &b);
            st.undo(m);
            for i in 0..3 {
                prop_assert!(st.binding(MetaId(i)).is_none());
            }
            prop_assert_eq!(st.mark(), m);
        }

        #[test]
        fn resolve_is_idempotent(a in arb_term(3), b in arb_term(3)) {
            let mut st = store_with(3);
            let _ = unify(&mut st, &a, &b);
            let r = st.resolve(&a);
            prop_assert_eq!(st.resolve(&r), r);
        }
    }

    #[test]
    fn symbols_compare_by_name() {
        assert_eq!(Symbol::new("z"), Symbol::new("z"));
    }
}
