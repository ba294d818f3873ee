//! Clark completion: the clauses of one predicate become a single clause
//! `p Y1 .. Yn :- D1 ; D2 ; .. ; ff` where each disjunct existentially
//! closes its own variables over the head equations and the body.

use super::goal::{reindex_term, Goal};
use super::Clause;
use crate::terms::Term;

/// Splits a clause body at top-level `;`, distributing `,` over it.
/// `ff` disjuncts disappear.
fn disjuncts(g: &Goal) -> Vec<Goal> {
    match g {
        Goal::Or(a, b) => {
            let mut v = disjuncts(a);
            v.extend(disjuncts(b));
            v
        }
        Goal::And(a, b) => {
            let (l, r) = (disjuncts(a), disjuncts(b));
            l.iter()
                .flat_map(|x| r.iter().map(move |y| Goal::and(x.clone(), y.clone())))
                .collect()
        }
        Goal::Ff => Vec::new(),
        other => vec![other.clone()],
    }
}

/// Positions (0 = outermost) of the `outer` clause variables occurring in `t`.
fn occurrences(t: &Term, depth: u32, outer: u32, seen: &mut [bool]) {
    match t {
        Term::Bound(i) if *i >= depth => seen[(outer - 1 - (i - depth)) as usize] = true,
        Term::App(f, a) => {
            occurrences(f, depth, outer, seen);
            occurrences(a, depth, outer, seen);
        }
        Term::Abs(b) => occurrences(b, depth + 1, outer, seen),
        _ => {}
    }
}

/// Completes the clauses of predicate `name`/`arity`. Returns the completed
/// clause and its number of disjuncts.
pub fn complete(name: &str, arity: usize, clauses: &[Clause]) -> (Clause, usize) {
    let n = arity as u32;
    let mut ds = Vec::new();
    for c in clauses {
        let nv = c.vars.len() as u32;
        let args = c.head_args();
        for body in disjuncts(&c.body) {
            // A head argument that is a variable seen for the first time is
            // renamed to the parameter; anything else becomes an equation.
            let mut map: Vec<Option<u32>> = vec![None; nv as usize];
            let mut eqs = Vec::new();
            for (j, t) in args.iter().enumerate() {
                match t {
                    Term::Bound(i) if map[(nv - 1 - i) as usize].is_none() => {
                        map[(nv - 1 - i) as usize] = Some(j as u32);
                    }
                    _ => eqs.push((j as u32, t.clone())),
                }
            }
            let mut seen = vec![false; nv as usize];
            for (_, t) in &eqs {
                occurrences(t, 0, nv, &mut seen);
            }
            body.visit_terms(0, &mut |t, d| occurrences(t, d, nv, &mut seen));
            let mut k = 0;
            for p in 0..nv as usize {
                if map[p].is_none() && seen[p] {
                    map[p] = Some(n + k);
                    k += 1;
                }
            }
            // Variables that occur nowhere are never looked up.
            let map: Vec<u32> = map.into_iter().map(|m| m.unwrap_or(0)).collect();
            let total = n + k;
            let mut parts: Vec<Goal> = eqs
                .iter()
                .map(|(j, t)| Goal::Eq(Term::Bound(total - 1 - j), reindex_term(t, 0, nv, &map, total)))
                .collect();
            parts.push(body.reindex(nv, &map, total));
            let mut d = Goal::conj(parts);
            for _ in 0..k {
                d = Goal::some(d);
            }
            ds.push(d);
        }
    }
    let count = ds.len();
    let body = ds.into_iter().rev().fold(Goal::Ff, |acc, d| Goal::or(d, acc));
    let vars: Vec<String> = (1..=arity).map(|i| format!("Y{i}")).collect();
    let head = Term::call(name, (0..n).map(|j| Term::Bound(n - 1 - j)));
    (Clause { vars, head, body }, count)
}

#[cfg(test)]
mod tests {
    use crate::syntax::parse_program;

    fn completed(src: &str, pred: &str) -> String {
        parse_program(src).unwrap().preds[pred].completed.to_string()
    }

    #[test]
    fn isnat_completion() {
        let src = "ctor z 0. ctor s 1. isnat z. isnat (s N) :- isnat N.";
        assert_eq!(
            completed(src, "isnat"),
            "isnat Y1 :- Y1 = z, tt ; (some Y\\ Y1 = s Y, isnat Y) ; ff."
        );
    }

    #[test]
    fn single_fact() {
        assert_eq!(completed("foo.", "foo"), "foo :- tt ; ff.");
    }

    #[test]
    fn repeated_head_variable_becomes_an_equation() {
        let src = "ctor nil 0. append nil K K.";
        assert_eq!(completed(src, "append"), "append Y1 Y2 Y3 :- Y1 = nil, Y3 = Y2, tt ; ff.");
    }

    #[test]
    fn disjunctive_bodies_split() {
        let src = "a. b. c. p :- a, (b ; c). q :- ff ; a.";
        assert_eq!(completed(src, "p"), "p :- a, b ; a, c ; ff.");
        assert_eq!(completed(src, "q"), "q :- a ; ff.");
    }
}
