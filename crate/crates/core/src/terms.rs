//! Term representation: constants, applications, de Bruijn abstractions,
//! metavariables (logic variables) and eigenvariables (scoped parameters).
//!
//! Bound variables are de Bruijn indices. Terms stored in a [`Store`] binding
//! are always closed: they carry no loose `Bound` index.

use std::fmt;
use std::sync::Arc;

/// Constant name. Cheap to clone.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Symbol(Arc<str>);

impl Symbol {
    pub fn new(name: &str) -> Self {
        Symbol(Arc::from(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MetaId(pub u32);

/// A parameter introduced by a universal goal. Metavariables of level `k`
/// may only be bound to terms whose eigenvariables have level `<= k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Eigen {
    pub id: u32,
    pub level: u32,
}

/// Level given to the parameters unification introduces when it descends
/// under a pair of abstractions; no metavariable can capture them.
pub const LOCAL_LEVEL: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Meta(MetaId),
    Eigen(Eigen),
    Const(Symbol),
    /// Integer literal; compares by value.
    Int(i64),
    /// de Bruijn index.
    Bound(u32),
    App(Arc<Term>, Arc<Term>),
    Abs(Arc<Term>),
}

/// Name of the list constructor written infix as `::`.
pub const CONS: &str = "cons";

impl Term {
    pub fn cnst(name: &str) -> Term {
        Term::Const(Symbol::new(name))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn abs(body: Term) -> Term {
        Term::Abs(Arc::new(body))
    }

    /// Builds `f a1 .. an` for a named constant.
    pub fn call(name: &str, args: impl IntoIterator<Item = Term>) -> Term {
        Term::apps(Term::cnst(name), args)
    }

    pub fn cons(head: Term, tail: Term) -> Term {
        Term::call(CONS, [head, tail])
    }

    /// Builds a `::`-list terminated by `nil`.
    pub fn list(items: impl IntoIterator<Item = Term>, nil: Term) -> Term {
        let items: Vec<Term> = items.into_iter().collect();
        items.into_iter().rev().fold(nil, |acc, x| Term::cons(x, acc))
    }

    /// Splits an application spine into head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut t = self;
        while let Term::App(f, a) = t {
            args.push(&**a);
            t = f;
        }
        args.reverse();
        (t, args)
    }

    pub fn head_symbol(&self) -> Option<&Symbol> {
        match self.spine().0 {
            Term::Const(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_int(&self) -> Option<i64> {
        match self {
            Term::Int(n) => Some(*n),
            _ => None,
        }
    }

    /// True iff the term has no loose de Bruijn index.
    pub fn is_closed(&self) -> bool {
        !has_loose(self, 0)
    }

    pub fn has_meta(&self) -> bool {
        match self {
            Term::Meta(_) => true,
            Term::App(f, a) => f.has_meta() || a.has_meta(),
            Term::Abs(b) => b.has_meta(),
            _ => false,
        }
    }

    /// Metavariables in left-to-right order of first occurrence.
    pub fn metas(&self) -> Vec<MetaId> {
        fn go(t: &Term, out: &mut Vec<MetaId>) {
            match t {
                Term::Meta(m) => {
                    if !out.contains(m) {
                        out.push(*m)
                    }
                }
                Term::App(f, a) => {
                    go(f, out);
                    go(a, out);
                }
                Term::Abs(b) => go(b, out),
                _ => {}
            }
        }
        let mut out = Vec::new();
        go(self, &mut out);
        out
    }

    pub fn has_eigen(&self) -> bool {
        match self {
            Term::Eigen(_) => true,
            Term::App(f, a) => f.has_eigen() || a.has_eigen(),
            Term::Abs(b) => b.has_eigen(),
            _ => false,
        }
    }

    pub fn has_abs(&self) -> bool {
        match self {
            Term::Abs(_) => true,
            Term::App(f, a) => f.has_abs() || a.has_abs(),
            _ => false,
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Term::App(f, a) => f.size() + a.size(),
            Term::Abs(b) => 1 + b.size(),
            _ => 1,
        }
    }
}

/// Adds `by` to every index of `t` that is loose at `cutoff`.
pub fn shift(t: &Term, by: u32, cutoff: u32) -> Term {
    if by == 0 {
        return t.clone();
    }
    match t {
        Term::Bound(i) if *i >= cutoff => Term::Bound(i + by),
        Term::App(f, a) => Term::app(shift(f, by, cutoff), shift(a, by, cutoff)),
        Term::Abs(b) => Term::abs(shift(b, by, cutoff + 1)),
        _ => t.clone(),
    }
}

/// Substitutes `args` for the `args.len()` outermost loose indices of `body`;
/// `args[0]` replaces the outermost one. Remaining loose indices are lowered.
pub fn instantiate_many(body: &Term, args: &[Term]) -> Term {
    instantiate_many_at(body, 0, args)
}

/// As [`instantiate_many`] for a `body` sitting under `depth` binders that
/// are not being instantiated.
pub fn instantiate_many_at(body: &Term, depth: u32, args: &[Term]) -> Term {
    fn go(t: &Term, depth: u32, args: &[Term], closed: &[bool]) -> Term {
        let n = args.len() as u32;
        match t {
            Term::Bound(i) if *i >= depth => {
                let j = i - depth;
                if j < n {
                    let k = (n - 1 - j) as usize;
                    if closed[k] {
                        args[k].clone()
                    } else {
                        shift(&args[k], depth, 0)
                    }
                } else {
                    Term::Bound(i - n)
                }
            }
            Term::App(f, a) => Term::app(go(f, depth, args, closed), go(a, depth, args, closed)),
            Term::Abs(b) => Term::abs(go(b, depth + 1, args, closed)),
            _ => t.clone(),
        }
    }
    if args.is_empty() || !has_loose(body, depth) {
        return body.clone();
    }
    let closed: Vec<bool> = args.iter().map(Term::is_closed).collect();
    go(body, depth, args, &closed)
}

/// True iff `t`, sitting under `depth` binders, mentions an index bound
/// outside them.
pub fn has_loose(t: &Term, depth: u32) -> bool {
    match t {
        Term::Bound(i) => *i >= depth,
        Term::App(f, a) => has_loose(f, depth) || has_loose(a, depth),
        Term::Abs(b) => has_loose(b, depth + 1),
        _ => false,
    }
}

/// Rebuilds `t` (under `depth` binders) replacing each index loose at that
/// depth: `f(j, d)` receives the index relative to the outside and the
/// actual binder depth `d` at the occurrence.
pub fn map_loose(t: &Term, depth: u32, f: &impl Fn(u32, u32) -> Term) -> Term {
    match t {
        Term::Bound(i) if *i >= depth => f(i - depth, depth),
        Term::App(a, b) => Term::app(map_loose(a, depth, f), map_loose(b, depth, f)),
        Term::Abs(b) => Term::abs(map_loose(b, depth + 1, f)),
        _ => t.clone(),
    }
}

/// Opens an abstraction body with `arg`.
pub fn instantiate(body: &Term, arg: &Term) -> Term {
    instantiate_many(body, std::slice::from_ref(arg))
}

#[derive(Clone, Debug)]
struct Slot {
    binding: Option<Term>,
    level: u32,
    /// Trail position of the binding.
    bound_at: usize,
    ground: Option<GroundInfo>,
}

/// Set once a binding is known to resolve to a ground term.
#[derive(Clone, Copy, Debug)]
struct GroundInfo {
    /// Highest eigenvariable level in the resolved term.
    eigens: Option<u32>,
    /// The newest binding the fact depends on, by trail position and stamp.
    /// The fact holds exactly as long as that binding survives.
    newest: usize,
    stamp: u64,
}

#[derive(Clone, Debug)]
enum Undo {
    Bind(MetaId),
    Level(MetaId, u32),
}

/// A checkpoint of a [`Store`]; undoing to it restores the exact prior state.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Mark {
    trail: usize,
    metas: usize,
    eigens: u32,
}

/// Metavariable bindings with a trail for backtracking.
#[derive(Clone, Debug, Default)]
pub struct Store {
    slots: Vec<Slot>,
    trail: Vec<Undo>,
    /// One stamp per trail entry, unique over the store's lifetime.
    stamps: Vec<u64>,
    next_stamp: u64,
    next_eigen: u32,
}

impl Store {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn fresh_meta(&mut self, level: u32) -> Term {
        let id = MetaId(self.slots.len() as u32);
        self.slots.push(Slot {
            binding: None,
            level,
            bound_at: 0,
            ground: None,
        });
        Term::Meta(id)
    }

    pub fn fresh_eigen(&mut self, level: u32) -> Term {
        let id = self.next_eigen;
        self.next_eigen += 1;
        Term::Eigen(Eigen { id, level })
    }

    pub fn meta_count(&self) -> usize {
        self.slots.len()
    }

    pub fn level(&self, m: MetaId) -> u32 {
        self.slots[m.0 as usize].level
    }

    pub fn binding(&self, m: MetaId) -> Option<&Term> {
        self.slots[m.0 as usize].binding.as_ref()
    }

    /// Records a binding. The caller is responsible for the occurs-check and
    /// scope-safety; `unify` is the only intended caller.
    pub fn bind(&mut self, m: MetaId, t: Term) {
        let slot = &mut self.slots[m.0 as usize];
        debug_assert!(slot.binding.is_none(), "rebinding {m:?}");
        slot.binding = Some(t);
        slot.bound_at = self.trail.len();
        slot.ground = None;
        self.push_trail(Undo::Bind(m));
    }

    fn push_trail(&mut self, entry: Undo) {
        self.trail.push(entry);
        self.stamps.push(self.next_stamp);
        self.next_stamp += 1;
    }

    /// For a bound `m` whose binding resolves to a ground term, the highest
    /// eigenvariable level in that term. `None` when `m` is unbound or its
    /// binding may still mention a metavariable.
    pub fn ground_level(&mut self, m: MetaId) -> Option<Option<u32>> {
        self.ground_info(m).map(|g| g.eigens)
    }

    fn ground_info(&mut self, m: MetaId) -> Option<GroundInfo> {
        let slot = &self.slots[m.0 as usize];
        if let Some(g) = slot.ground {
            if self.stamps.get(g.newest) == Some(&g.stamp) {
                return Some(g);
            }
        }
        let b = slot.binding.clone()?;
        let own = slot.bound_at;
        let (eigens, newest) = self.ground_term(&b)?;
        let newest = newest.max(own);
        let g = GroundInfo {
            eigens,
            newest,
            stamp: self.stamps[newest],
        };
        self.slots[m.0 as usize].ground = Some(g);
        Some(g)
    }

    /// Highest eigenvariable level and newest binding trail position of a
    /// ground term. Conservative: a flexible application counts as
    /// non-ground even if its redex would discard the offending arguments.
    fn ground_term(&mut self, t: &Term) -> Option<(Option<u32>, usize)> {
        match t {
            Term::Meta(m) => self.ground_info(*m).map(|g| (g.eigens, g.newest)),
            Term::Eigen(e) => Some((Some(e.level), 0)),
            Term::App(f, a) => {
                let (e1, n1) = self.ground_term(f)?;
                let (e2, n2) = self.ground_term(a)?;
                Some((e1.max(e2), n1.max(n2)))
            }
            Term::Abs(b) => self.ground_term(b),
            _ => Some((None, 0)),
        }
    }

    pub fn set_level(&mut self, m: MetaId, level: u32) {
        let slot = &mut self.slots[m.0 as usize];
        let old = slot.level;
        slot.level = level;
        self.push_trail(Undo::Level(m, old));
    }

    pub fn mark(&self) -> Mark {
        Mark {
            trail: self.trail.len(),
            metas: self.slots.len(),
            eigens: self.next_eigen,
        }
    }

    pub fn undo(&mut self, mark: Mark) {
        while self.trail.len() > mark.trail {
            self.stamps.pop();
            match self.trail.pop() {
                Some(Undo::Bind(m)) => self.slots[m.0 as usize].binding = None,
                Some(Undo::Level(m, l)) => self.slots[m.0 as usize].level = l,
                None => break,
            }
        }
        self.slots.truncate(mark.metas);
        self.next_eigen = mark.eigens;
    }

    /// Head-normalizes: dereferences bound metavariables at the head and
    /// contracts beta-redexes created by them.
    pub fn whnf(&self, t: &Term) -> Term {
        self.whnf_changed(t).unwrap_or_else(|| t.clone())
    }

    /// The weak head normal form of `t`, or `None` when `t` already is one.
    fn whnf_changed(&self, t: &Term) -> Option<Term> {
        match t {
            Term::Meta(m) => self.binding(*m).map(|b| self.whnf(b)),
            Term::App(f, a) => {
                let hf = self.whnf_changed(f)?;
                match &hf {
                    Term::Abs(body) => Some(self.whnf(&instantiate(body, a))),
                    _ => Some(Term::App(Arc::new(hf), a.clone())),
                }
            }
            _ => None,
        }
    }

    /// Replaces every bound metavariable by its binding, recursively, and
    /// beta-normalizes the redexes this exposes.
    pub fn resolve(&self, t: &Term) -> Term {
        let h = self.whnf(t);
        match &h {
            Term::App(f, a) => Term::app(self.resolve(f), self.resolve(a)),
            Term::Abs(b) => Term::abs(self.resolve(b)),
            _ => h,
        }
    }

    /// True iff the resolved term contains no metavariable.
    pub fn ground(&mut self, t: &Term) -> bool {
        self.first_unbound(t).is_none()
    }

    /// Some unbound metavariable of the resolved `t`, found without
    /// rebuilding it.
    pub fn first_unbound(&mut self, t: &Term) -> Option<MetaId> {
        if let Term::Meta(m) = t {
            if self.ground_info(*m).is_some() {
                return None;
            }
        }
        match self.whnf(t) {
            Term::Meta(m) => Some(m),
            Term::App(f, a) => self.first_unbound(&f).or_else(|| self.first_unbound(&a)),
            Term::Abs(b) => self.first_unbound(&b),
            _ => None,
        }
    }

    /// Checks the scope-safety invariant over every binding.
    pub fn audit(&self) -> Result<(), String> {
        for (i, slot) in self.slots.iter().enumerate() {
            if let Some(b) = &slot.binding {
                let b = self.resolve(b);
                if let Some(e) = max_eigen_level(&b) {
                    if e > slot.level {
                        return Err(format!(
                            "metavariable {i} at level {} bound to a term with an eigenvariable of level {e}",
                            slot.level
                        ));
                    }
                }
                if !b.is_closed() {
                    return Err(format!("metavariable {i} bound to an open term"));
                }
            }
        }
        Ok(())
    }
}

fn max_eigen_level(t: &Term) -> Option<u32> {
    match t {
        Term::Eigen(e) => Some(e.level),
        Term::App(f, a) => max_eigen_level(f).max(max_eigen_level(a)),
        Term::Abs(b) => max_eigen_level(b),
        _ => None,
    }
}

/// The closed subterms of `s`, each once, in pre-order. Descends into the
/// arguments of applications and under abstractions; subterms mentioning a
/// variable bound above them are not reported, nor are bare abstractions.
pub fn subterms(s: &Term) -> Vec<Term> {
    fn go(t: &Term, out: &mut Vec<Term>) {
        if t.is_closed() && !matches!(t, Term::Abs(_)) && !out.contains(t) {
            out.push(t.clone());
        }
        match t {
            Term::App(..) => {
                let (head, args) = t.spine();
                if matches!(head, Term::Abs(_)) {
                    go(head, out);
                }
                for a in args {
                    go(a, out);
                }
            }
            Term::Abs(b) => go(b, out),
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(s, &mut out);
    out
}

/// `t` occurs in `s` (reflexively). Both terms must be resolved.
pub fn subterm(t: &Term, s: &Term) -> bool {
    t == s || subterms(s).iter().any(|u| u == t)
}

/// `t` occurs in `s` at a position other than the root.
pub fn proper_subterm(t: &Term, s: &Term) -> bool {
    t != s && subterm(t, s)
}

/// Keeps the items that are not a proper subterm of another item, in the
/// original order, each value once.
pub fn prune_subsumed(items: &[Term]) -> Vec<Term> {
    let mut uniq: Vec<Term> = Vec::new();
    for t in items {
        if !uniq.contains(t) {
            uniq.push(t.clone());
        }
    }
    uniq.iter()
        .filter(|t| !uniq.iter().any(|u| proper_subterm(t, u)))
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z() -> Term {
        Term::cnst("z")
    }
    fn s(t: Term) -> Term {
        Term::call("s", [t])
    }
    fn nil() -> Term {
        Term::cnst("nil")
    }

    /// Independent oracle: every position of a first-order term.
    fn positions(t: &Term) -> Vec<Term> {
        let mut out = vec![t.clone()];
        let (_, args) = t.spine();
        for a in args {
            out.extend(positions(a));
        }
        out
    }

    #[test]
    fn resolve_follows_chains() {
        let mut st = Store::new();
        let x = st.fresh_meta(0);
        let y = st.fresh_meta(0);
        let (Term::Meta(mx), Term::Meta(my)) = (&x, &y) else { unreachable!() };
        st.bind(*mx, s(y.clone()));
        st.bind(*my, z());
        assert_eq!(st.resolve(&x), s(z()));
        assert_eq!(st.resolve(&s(z())), s(z()));
    }

    #[test]
    fn undo_restores_store() {
        let mut st = Store::new();
        let x = st.fresh_meta(0);
        let m = st.mark();
        let Term::Meta(mx) = x else { unreachable!() };
        st.bind(mx, z());
        st.fresh_meta(1);
        st.fresh_eigen(1);
        st.undo(m);
        assert!(st.binding(mx).is_none());
        assert_eq!(st.meta_count(), 1);
        assert_eq!(st.mark(), m);
    }

    #[test]
    fn ground_examples() {
        let mut st = Store::new();
        let l = Term::list([z(), s(z())], nil());
        assert!(st.ground(&l));
        let x = st.fresh_meta(0);
        assert!(!st.ground(&Term::cons(x, nil())));
        let id = Term::call("lam", [Term::abs(Term::Bound(0))]);
        assert!(st.ground(&id));
    }

    #[test]
    fn subterm_examples_match_position_oracle() {
        let cases = [
            (z(), z()),
            (z(), s(s(z()))),
            (s(z()), Term::cons(z(), nil())),
            (s(z()), Term::cons(s(z()), nil())),
        ];
        for (t, u) in cases {
            assert_eq!(subterm(&t, &u), positions(&u).contains(&t), "{t:?} in {u:?}");
        }
        assert!(subterm(&z(), &z()));
        assert!(!subterm(&s(z()), &Term::cons(z(), nil())));
        assert!(!proper_subterm(&z(), &z()));
        assert!(proper_subterm(&z(), &s(z())));
        assert!(proper_subterm(&s(z()), &Term::cons(s(z()), nil())));
    }

    #[test]
    fn subterms_under_binders_exclude_open_terms() {
        // lam x\ app x (lam y\ y)
        let inner = Term::call("lam", [Term::abs(Term::Bound(0))]);
        let t = Term::call(
            "lam",
            [Term::abs(Term::call("app", [Term::Bound(0), inner.clone()]))],
        );
        let subs = subterms(&t);
        assert_eq!(subs, vec![t.clone(), inner]);
    }

    #[test]
    fn groundness_cache_follows_undo() {
        let mut st = Store::new();
        let xs = st.fresh_meta(0);
        let tail = st.fresh_meta(0);
        let (Term::Meta(x), Term::Meta(t)) = (xs.clone(), tail.clone()) else { unreachable!() };
        st.bind(x, Term::cons(z(), tail.clone()));
        let before = st.mark();
        st.bind(t, nil());
        assert_eq!(st.ground_level(x), Some(None));
        st.undo(before);
        assert_eq!(st.ground_level(x), None);
        assert!(!st.ground(&xs));
        st.bind(t, Term::cons(z(), nil()));
        assert!(st.ground(&xs));
    }

    #[test]
    fn prune_examples() {
        assert_eq!(prune_subsumed(&[z(), s(z())]), vec![s(z())]);
        assert_eq!(prune_subsumed(&[z()]), vec![z()]);
        let l = Term::cons(z(), nil());
        assert_eq!(prune_subsumed(&[s(z()), l.clone()]), vec![s(z()), l]);
        assert_eq!(prune_subsumed(&[z(), z()]), vec![z()]);
    }

    #[test]
    fn ints_compare_by_value() {
        assert_eq!(Term::Int(-1), Term::Int(-1));
        assert_ne!(Term::Int(0), Term::Int(1));
    }

    #[test]
    fn instantiate_shifts_open_arguments() {
        // (x\ y\ x) applied to Bound(0) under one binder stays well-scoped.
        let body = Term::abs(Term::Bound(1));
        let r = instantiate(&body, &Term::Bound(0));
        assert_eq!(r, Term::abs(Term::Bound(1)));
    }
}
