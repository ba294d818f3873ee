//! Surface-syntax printing. Bound variables are named from their binder
//! depth, so α-equivalent terms print identically.

use super::goal::Goal;
use crate::terms::{Term, CONS};
use std::collections::HashSet;
use std::fmt::{self, Write};

/// Reserved certificate list constructors, printed as `[a, b]`.
pub const CERT_CONS: &str = "$cons";
pub const CERT_NIL: &str = "$nil";
/// Reserved pairing constructor, printed infix as `<c>`.
pub const PAIR: &str = "pair";

/// Binder name for depth `d`: x, y, z, x1, y1, z1, x2, ...
pub fn binder_name(d: usize, upper: bool) -> String {
    let base = ["x", "y", "z"][d % 3];
    let base = if upper { base.to_uppercase() } else { base.to_string() };
    match d / 3 {
        0 => base,
        k => format!("{base}{k}"),
    }
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Prec {
    Pair,
    Cons,
    /// Left operand of `::`: applications stay bare, lists need brackets.
    ConsLeft,
    Arg,
}

struct Printer<'a> {
    out: &'a mut dyn Write,
    names: Vec<String>,
    /// Constants of the printed term; binders must not shadow them.
    constants: HashSet<String>,
}

impl Printer<'_> {
    fn name_of(&self, i: u32) -> String {
        let n = self.names.len();
        if (i as usize) < n {
            self.names[n - 1 - i as usize].clone()
        } else {
            format!("#b{}", i as usize - n)
        }
    }

    /// Name for a new binder; skips names still visible so no capture occurs.
    fn fresh(&mut self, upper: bool) -> String {
        let mut d = self.names.len();
        while {
            let candidate = binder_name(d, upper);
            self.names.contains(&candidate) || self.constants.contains(&candidate)
        } {
            d += 1;
        }
        let name = binder_name(d, upper);
        self.names.push(name.clone());
        name
    }

    /// `rightmost`: nothing follows within the current bracket, so a trailing
    /// abstraction may be written bare.
    fn term(&mut self, t: &Term, prec: Prec, rightmost: bool) -> fmt::Result {
        match t {
            Term::Meta(m) => write!(self.out, "_G{}", m.0),
            Term::Eigen(e) => write!(self.out, "#{}", e.id),
            Term::Const(c) if c.as_str() == CERT_NIL => self.out.write_str("[]"),
            Term::Const(c) => self.out.write_str(c.as_str()),
            Term::Int(n) if *n < 0 => write!(self.out, "(- {})", n.unsigned_abs()),
            Term::Int(n) => write!(self.out, "{n}"),
            Term::Bound(i) => {
                let name = self.name_of(*i);
                self.out.write_str(&name)
            }
            Term::Abs(body) => {
                let paren = !rightmost;
                if paren {
                    self.out.write_char('(')?;
                }
                let name = self.fresh(false);
                write!(self.out, "{name}\\ ")?;
                self.term(body, Prec::Pair, true)?;
                self.names.pop();
                if paren {
                    self.out.write_char(')')?;
                }
                Ok(())
            }
            Term::App(..) => {
                let (head, args) = t.spine();
                let sym = head.head_symbol().map(|s| s.as_str());
                match (sym, args.len()) {
                    (Some(CONS), 2) => {
                        self.infix(prec, Prec::Cons, rightmost, args[0], " :: ", args[1])
                    }
                    (Some(PAIR), 2) => {
                        self.infix(prec, Prec::Pair, rightmost, args[0], " <c> ", args[1])
                    }
                    (Some(CERT_CONS), 2) => self.cert_list(t),
                    _ => {
                        let paren = prec == Prec::Arg;
                        let inner_right = paren || rightmost;
                        if paren {
                            self.out.write_char('(')?;
                        }
                        self.term(head, Prec::Arg, false)?;
                        let last = args.len() - 1;
                        for (k, a) in args.iter().enumerate() {
                            self.out.write_char(' ')?;
                            self.term(a, Prec::Arg, k == last && inner_right)?;
                        }
                        if paren {
                            self.out.write_char(')')?;
                        }
                        Ok(())
                    }
                }
            }
        }
    }

    fn infix(
        &mut self,
        prec: Prec,
        own: Prec,
        rightmost: bool,
        left: &Term,
        op: &str,
        right: &Term,
    ) -> fmt::Result {
        let paren = prec > own;
        let inner_right = paren || rightmost;
        if paren {
            self.out.write_char('(')?;
        }
        // `::` is right-associative and `<c>` left-associative.
        let (lp, rp) = if own == Prec::Cons {
            (Prec::ConsLeft, Prec::Cons)
        } else {
            (Prec::Pair, Prec::Cons)
        };
        self.term(left, lp, false)?;
        self.out.write_str(op)?;
        self.term(right, rp, inner_right)?;
        if paren {
            self.out.write_char(')')?;
        }
        Ok(())
    }

    fn cert_list(&mut self, t: &Term) -> fmt::Result {
        self.out.write_char('[')?;
        let mut cur = t;
        let mut first = true;
        loop {
            let (head, args) = cur.spine();
            match (head.head_symbol().map(|s| s.as_str()), args.len()) {
                (Some(CERT_CONS), 2) => {
                    if !first {
                        self.out.write_str(", ")?;
                    }
                    first = false;
                    self.term(args[0], Prec::Pair, true)?;
                    cur = args[1];
                }
                (Some(CERT_NIL), 0) => break,
                _ => {
                    self.out.write_str(" | ")?;
                    self.term(cur, Prec::Pair, true)?;
                    break;
                }
            }
        }
        self.out.write_char(']')
    }

    /// Goal levels, loosest first: `;` 0, `,` 1, `=>`/`-o` 2, `!` 3, atoms 4.
    fn goal(&mut self, g: &Goal, prec: u8, rightmost: bool) -> fmt::Result {
        let own = match g {
            Goal::Or(..) => 0,
            Goal::And(..) => 1,
            Goal::ImpI(..) | Goal::ImpL(..) => 2,
            Goal::Bang(_) => 3,
            _ => 4,
        };
        let binder = matches!(g, Goal::Some(_) | Goal::All(_));
        let paren = own < prec || (binder && !rightmost);
        let right = paren || rightmost;
        if paren {
            self.out.write_char('(')?;
        }
        match g {
            Goal::Tt => self.out.write_str("tt")?,
            Goal::Ff => self.out.write_str("ff")?,
            Goal::Eq(a, b) => {
                self.term(a, Prec::Cons, false)?;
                self.out.write_str(" = ")?;
                self.term(b, Prec::Cons, right)?;
            }
            Goal::And(a, b) | Goal::Or(a, b) => {
                self.goal(a, own + 1, false)?;
                self.out.write_str(if own == 0 { " ; " } else { ", " })?;
                self.goal(b, own, right)?;
            }
            Goal::ImpI(a, b) | Goal::ImpL(a, b) => {
                self.term(a, Prec::Pair, false)?;
                self.out.write_str(if matches!(g, Goal::ImpI(..)) { " => " } else { " -o " })?;
                self.goal(b, own, right)?;
            }
            Goal::Bang(b) => {
                self.out.write_str("! ")?;
                self.goal(b, 3, right)?;
            }
            Goal::Some(b) | Goal::All(b) => {
                let some = matches!(g, Goal::Some(_));
                let name = self.fresh(some);
                write!(self.out, "{} {name}\\ ", if some { "some" } else { "pi" })?;
                self.goal(b, 0, true)?;
                self.names.pop();
            }
            Goal::Atom(a) => self.term(a, Prec::Pair, right)?,
        }
        if paren {
            self.out.write_char(')')?;
        }
        Ok(())
    }
}

/// Prints `t` with `names` naming its loose variables (innermost last).
pub fn write_term(out: &mut dyn Write, t: &Term, names: &[String]) -> fmt::Result {
    let mut constants = HashSet::new();
    collect_constants(t, &mut constants);
    Printer {
        out,
        names: names.to_vec(),
        constants,
    }
    .term(t, Prec::Pair, true)
}

fn collect_constants(t: &Term, out: &mut HashSet<String>) {
    match t {
        Term::Const(c) => {
            out.insert(c.as_str().to_string());
        }
        Term::App(f, a) => {
            collect_constants(f, out);
            collect_constants(a, out);
        }
        Term::Abs(b) => collect_constants(b, out),
        _ => {}
    }
}

pub fn write_goal(out: &mut dyn Write, g: &Goal, names: &[String]) -> fmt::Result {
    let mut constants = HashSet::new();
    g.visit_terms(0, &mut |t, _| collect_constants(t, &mut constants));
    Printer {
        out,
        names: names.to_vec(),
        constants,
    }
    .goal(g, 0, true)
}

pub fn term_to_string(t: &Term, names: &[String]) -> String {
    let mut s = String::new();
    write_term(&mut s, t, names).expect("writing to a String");
    s
}

pub fn goal_to_string(g: &Goal, names: &[String]) -> String {
    let mut s = String::new();
    write_goal(&mut s, g, names).expect("writing to a String");
    s
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, &[])
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_goal(f, self, &[])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam(body: Term) -> Term {
        Term::call("lam", [Term::abs(body)])
    }

    #[test]
    fn binders_avoid_constant_names() {
        let t = lam(lam(lam(Term::call("s", [Term::cnst("z")]))));
        assert_eq!(term_to_string(&t, &[]), "lam x\\ lam y\\ lam x1\\ s z");
    }

    #[test]
    fn binder_names_cycle_by_depth() {
        let names: Vec<String> = (0..7).map(|d| binder_name(d, false)).collect();
        assert_eq!(names, ["x", "y", "z", "x1", "y1", "z1", "x2"]);
        assert_eq!(binder_name(3, true), "X1");
    }

    #[test]
    fn lambda_terms_print_in_surface_syntax() {
        let id = lam(Term::Bound(0));
        let omega = lam(Term::call("app", [Term::Bound(0), Term::Bound(0)]));
        let t = Term::call("app", [omega, Term::call("app", [id.clone(), id])]);
        assert_eq!(t.to_string(), "app (lam x\\ app x x) (app (lam x\\ x) (lam x\\ x))");
        let k = lam(lam(Term::call("app", [Term::Bound(1), Term::Bound(0)])));
        assert_eq!(k.to_string(), "lam x\\ lam y\\ app x y");
    }

    #[test]
    fn lists_and_integers() {
        let s = |t| Term::call("s", [t]);
        let l = Term::list([s(Term::cnst("z")), Term::cnst("z")], Term::cnst("nil"));
        assert_eq!(l.to_string(), "s z :: z :: nil");
        let nested = Term::cons(Term::cons(Term::cnst("z"), Term::cnst("nil")), Term::cnst("nil"));
        assert_eq!(nested.to_string(), "(z :: nil) :: nil");
        assert_eq!(Term::call("set", [Term::Int(-1)]).to_string(), "set (- 1)");
    }

    #[test]
    fn certificates_print_infix_pairs_and_lists() {
        let l = Term::call(CERT_CONS, [Term::cnst("z"), Term::cnst(CERT_NIL)]);
        let c = Term::call(
            PAIR,
            [Term::call("huniv", [l, Term::cnst("subterm")]), Term::call("height", [Term::Int(2)])],
        );
        assert_eq!(c.to_string(), "huniv [z] subterm <c> height 2");
    }

    #[test]
    fn goals_parenthesize_binders_and_disjunctions() {
        let a = |n: &str| Goal::Atom(Term::cnst(n));
        let g = Goal::and(Goal::or(a("a"), a("b")), Goal::some(Goal::Atom(Term::call("p", [Term::Bound(0)]))));
        assert_eq!(g.to_string(), "(a ; b), some X\\ p X");
        let h = Goal::and(Goal::some(a("a")), a("b"));
        assert_eq!(h.to_string(), "(some X\\ a), b");
        let imp = Goal::all(Goal::ImpI(
            Term::call("is_exp", [Term::Bound(0)]),
            std::sync::Arc::new(a("q")),
        ));
        assert_eq!(imp.to_string(), "pi x\\ is_exp x => q");
    }
}
