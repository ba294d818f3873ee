//! Goal formulas. Goal binders (`some`, `pi`) and term abstractions share one
//! de Bruijn numbering, so a `Some` body sees its variable as index 0 inside
//! every term it contains, shifted by any term binders in between.

use crate::terms::{has_loose, instantiate_many_at, map_loose, Term};
use std::sync::Arc;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Goal {
    Tt,
    /// Only produced as the terminator of a compiled disjunct list.
    Ff,
    Eq(Term, Term),
    And(Arc<Goal>, Arc<Goal>),
    Or(Arc<Goal>, Arc<Goal>),
    Some(Arc<Goal>),
    All(Arc<Goal>),
    /// Intuitionistic implication with an atomic antecedent.
    ImpI(Term, Arc<Goal>),
    /// Linear implication with an atomic antecedent.
    ImpL(Term, Arc<Goal>),
    Bang(Arc<Goal>),
    Atom(Term),
}

impl Goal {
    pub fn and(a: Goal, b: Goal) -> Goal {
        Goal::And(Arc::new(a), Arc::new(b))
    }

    pub fn or(a: Goal, b: Goal) -> Goal {
        Goal::Or(Arc::new(a), Arc::new(b))
    }

    pub fn some(body: Goal) -> Goal {
        Goal::Some(Arc::new(body))
    }

    pub fn all(body: Goal) -> Goal {
        Goal::All(Arc::new(body))
    }

    /// Right-nested conjunction; `Tt` when empty.
    pub fn conj(goals: impl IntoIterator<Item = Goal>) -> Goal {
        let mut v: Vec<Goal> = goals.into_iter().collect();
        let Some(mut acc) = v.pop() else { return Goal::Tt };
        while let Some(g) = v.pop() {
            acc = Goal::and(g, acc);
        }
        acc
    }

    /// Rebuilds every term, passing it the goal-binder depth it sits under.
    pub fn map_terms(&self, depth: u32, f: &impl Fn(&Term, u32) -> Term) -> Goal {
        let sub = |g: &Arc<Goal>, d: u32| Arc::new(g.map_terms(d, f));
        match self {
            Goal::Tt => Goal::Tt,
            Goal::Ff => Goal::Ff,
            Goal::Eq(a, b) => Goal::Eq(f(a, depth), f(b, depth)),
            Goal::And(a, b) => Goal::And(sub(a, depth), sub(b, depth)),
            Goal::Or(a, b) => Goal::Or(sub(a, depth), sub(b, depth)),
            Goal::Some(b) => Goal::Some(sub(b, depth + 1)),
            Goal::All(b) => Goal::All(sub(b, depth + 1)),
            Goal::ImpI(a, g) => Goal::ImpI(f(a, depth), sub(g, depth)),
            Goal::ImpL(a, g) => Goal::ImpL(f(a, depth), sub(g, depth)),
            Goal::Bang(g) => Goal::Bang(sub(g, depth)),
            Goal::Atom(a) => Goal::Atom(f(a, depth)),
        }
    }

    /// Substitutes `args` for the outermost loose variables, `args[0]` being
    /// the outermost, as [`crate::terms::instantiate_many`] does for terms.
    pub fn instantiate(&self, args: &[Term]) -> Goal {
        if args.is_empty() {
            return self.clone();
        }
        self.map_terms(0, &|t, d| instantiate_many_at(t, d, args))
    }

    /// True iff some term mentions a variable bound outside the goal.
    pub fn has_loose(&self, depth: u32) -> bool {
        let mut found = false;
        self.visit_terms(depth, &mut |t, d| found |= has_loose(t, d));
        found
    }

    pub fn visit_terms(&self, depth: u32, f: &mut impl FnMut(&Term, u32)) {
        match self {
            Goal::Tt | Goal::Ff => {}
            Goal::Eq(a, b) => {
                f(a, depth);
                f(b, depth);
            }
            Goal::And(a, b) | Goal::Or(a, b) => {
                a.visit_terms(depth, f);
                b.visit_terms(depth, f);
            }
            Goal::Some(b) | Goal::All(b) => b.visit_terms(depth + 1, f),
            Goal::ImpI(a, g) | Goal::ImpL(a, g) => {
                f(a, depth);
                g.visit_terms(depth, f);
            }
            Goal::Bang(g) => g.visit_terms(depth, f),
            Goal::Atom(a) => f(a, depth),
        }
    }

    /// Renumbers the `outer` loose variables: the variable at position `p`
    /// (0 = outermost) moves to position `map[p]` among `new_outer` binders.
    pub fn reindex(&self, outer: u32, map: &[u32], new_outer: u32) -> Goal {
        self.map_terms(0, &|t, d| reindex_term(t, d, outer, map, new_outer))
    }
}

/// Term-level counterpart of [`Goal::reindex`].
pub fn reindex_term(t: &Term, depth: u32, outer: u32, map: &[u32], new_outer: u32) -> Term {
    map_loose(t, depth, &|j, d| {
        assert!(j < outer, "variable escapes its clause");
        let pos = outer - 1 - j;
        Term::Bound(d + new_outer - 1 - map[pos as usize])
    })
}
