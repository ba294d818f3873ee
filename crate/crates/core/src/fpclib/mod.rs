//! The built-in certificate families, interpreted by one FPC that dispatches
//! on the certificate's head constructor:
//!
//! | certificate          | meaning                                            |
//! |----------------------|----------------------------------------------------|
//! | `height H`           | at most `H` nested backchains or inits per branch  |
//! | `sze In Out`         | `In - Out` backchain and init steps in total        |
//! | `max M`              | `M` records (or, when bound, replays) the proof    |
//! | `random`             | each disjunction picks one side by a random bit    |
//! | `noweight`           | each backchain picks a disjunct by declared weight |
//! | `collect In Out`     | `In` is the witness list followed by `Out`         |
//! | `huniv U subterm`    | witnesses are subterms of an item of `U`           |
//! | `huniv U proper`     | witnesses are proper subterms of an item of `U`    |
//! | `permissive`         | no restriction                                     |
//! | `A <c> B`            | both `A` and `B` accept every step                 |

mod random;

pub use random::RandomSource;

use crate::engine::EngineError;
use crate::kernel::{Alt, Alts, Fpc, FpcCx, Side};
use crate::syntax::print::{CERT_CONS, CERT_NIL, PAIR};
use crate::terms::{subterms, Term};

/// Constructors of recorded `max` proof trees.
pub mod max {
    pub const TT: &str = "mtt";
    pub const EQ: &str = "meq";
    pub const AND: &str = "mand";
    /// `mor S T` with side `S` either 1 or 2.
    pub const OR: &str = "mor";
    pub const SOME: &str = "msome";
    pub const BACKCHAIN: &str = "mbc";
    pub const INIT: &str = "minit";
    pub const IMP: &str = "mimp";
    /// `mall (x\ T)`, the subtree abstracted over the eigenvariable.
    pub const ALL: &str = "mall";
    pub const LIMP: &str = "mlimp";
    pub const BANG: &str = "mbang";
}

/// The standard FPC covering every built-in family.
#[derive(Clone, Copy, Debug, Default)]
pub struct StdFpc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Relation {
    Subterm,
    Proper,
}

enum Cert {
    Height(i64),
    Sze(Term, Term),
    Max(Term),
    Random,
    NoWeight,
    Cases { rnd: u32, weights: Vec<u32>, acc: u32 },
    Collect(Term, Term),
    Huniv(Term, Relation),
    Permissive,
    Pair(Term, Term),
}

#[derive(Clone, Copy)]
enum Leaf {
    Tt,
    Eq,
    Init,
}

#[derive(Clone, Copy)]
enum Unary<'t> {
    Some(&'t Term),
    Backchain(&'t Term),
    Imp,
    All(&'t Term),
    Limp,
    Bang,
}

fn bad(cx: &FpcCx, t: &Term, why: &str) -> EngineError {
    EngineError::BadCertificate(format!("{why}: {}", cx.store.resolve(t)))
}

fn int(cx: &FpcCx, t: &Term) -> Result<i64, EngineError> {
    cx.store.whnf(t).as_int().ok_or_else(|| bad(cx, t, "expected an integer"))
}

/// The items of a `[..]` certificate list.
fn items(cx: &FpcCx, t: &Term) -> Result<Vec<Term>, EngineError> {
    let mut out = Vec::new();
    let mut cur = cx.store.resolve(t);
    loop {
        let (head, args) = cur.spine();
        match (head.head_symbol().map(|s| s.as_str()), args.as_slice()) {
            (Some(CERT_NIL), []) => return Ok(out),
            (Some(CERT_CONS), [x, rest]) => {
                out.push((*x).clone());
                let rest = (*rest).clone();
                cur = rest;
            }
            _ => return Err(bad(cx, t, "expected a list")),
        }
    }
}

fn cert_list(items: &[u32]) -> Term {
    items
        .iter()
        .rev()
        .fold(Term::cnst(CERT_NIL), |acc, w| node(CERT_CONS, [Term::Int(*w as i64), acc]))
}

fn decode(cx: &FpcCx, cert: &Term) -> Result<Cert, EngineError> {
    let c = cx.store.whnf(cert);
    let (head, args) = c.spine();
    let name = head.head_symbol().map(|s| s.as_str().to_string());
    let arg = |i: usize| args[i].clone();
    Ok(match (name.as_deref(), args.len()) {
        (Some("height"), 1) => Cert::Height(int(cx, args[0])?),
        (Some("sze"), 2) => Cert::Sze(arg(0), arg(1)),
        (Some("max"), 1) => Cert::Max(arg(0)),
        (Some("random"), 0) => Cert::Random,
        (Some("noweight"), 0) => Cert::NoWeight,
        (Some("cases"), 3) => {
            let weights = items(cx, args[1])?
                .iter()
                .map(|w| w.as_int().and_then(|n| u32::try_from(n).ok()))
                .collect::<Option<Vec<u32>>>()
                .ok_or_else(|| bad(cx, &c, "weights must be natural numbers"))?;
            Cert::Cases {
                rnd: int(cx, args[0])? as u32,
                weights,
                acc: int(cx, args[2])? as u32,
            }
        }
        (Some("collect"), 2) => Cert::Collect(arg(0), arg(1)),
        (Some("huniv"), 2) => {
            let rel = match cx.store.whnf(args[1]).head_symbol().map(|s| s.as_str()) {
                Some("subterm") => Relation::Subterm,
                Some("proper") => Relation::Proper,
                _ => return Err(bad(cx, &c, "huniv relation must be subterm or proper")),
            };
            Cert::Huniv(arg(0), rel)
        }
        (Some("permissive"), 0) => Cert::Permissive,
        (Some(PAIR), 2) => Cert::Pair(arg(0), arg(1)),
        _ => return Err(bad(cx, &c, "unknown certificate")),
    })
}

fn node(name: &str, args: impl IntoIterator<Item = Term>) -> Term {
    Term::call(name, args)
}

fn pair(a: Term, b: Term) -> Term {
    node(PAIR, [a, b])
}

fn one<T>(out: T) -> Alts<T> {
    Ok(vec![Alt::pass(out)])
}

fn product<A, B, C>(left: Vec<Alt<A>>, right: Vec<Alt<B>>, f: impl Fn(&A, &B) -> Option<C>) -> Vec<Alt<C>> {
    let mut out = Vec::new();
    for l in &left {
        for r in &right {
            if let Some(c) = f(&l.out, &r.out) {
                let mut eqs = l.eqs.clone();
                eqs.extend(r.eqs.iter().cloned());
                out.push(Alt::with(eqs, c));
            }
        }
    }
    out
}

/// Candidate witnesses for `huniv`: related to some universe item, each once.
fn candidates(universe: &[Term], rel: Relation) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for u in universe {
        for t in subterms(u) {
            if (rel == Relation::Subterm || &t != u) && !out.contains(&t) {
                out.push(t);
            }
        }
    }
    out
}

impl StdFpc {
    fn leaf(&self, cx: &mut FpcCx, cert: &Term, leaf: Leaf) -> Alts<()> {
        match decode(cx, cert)? {
            // A hypothesis use is one decide step, as a backchain is.
            Cert::Height(h) => Ok(if matches!(leaf, Leaf::Init) && h <= 0 { Vec::new() } else { vec![Alt::pass(())] }),
            Cert::Random | Cert::NoWeight | Cert::Huniv(..) | Cert::Permissive => one(()),
            Cert::Sze(budget, out) => match leaf {
                Leaf::Init => {
                    let n = int(cx, &budget)?;
                    Ok(if n > 0 {
                        vec![Alt::with(vec![(out, Term::Int(n - 1))], ())]
                    } else {
                        Vec::new()
                    })
                }
                Leaf::Tt | Leaf::Eq => Ok(vec![Alt::with(vec![(out, budget)], ())]),
            },
            Cert::Max(tree) => {
                let name = match leaf {
                    Leaf::Tt => max::TT,
                    Leaf::Eq => max::EQ,
                    Leaf::Init => max::INIT,
                };
                Ok(vec![Alt::with(vec![(tree, Term::cnst(name))], ())])
            }
            Cert::Collect(items, rest) => Ok(vec![Alt::with(vec![(items, rest)], ())]),
            Cert::Cases { .. } => Err(EngineError::MalformedBody(format!(
                "weighted choice reached a leaf: {}",
                cx.store.resolve(cert)
            ))),
            Cert::Pair(a, b) => {
                let l = self.leaf(cx, &a, leaf)?;
                let r = self.leaf(cx, &b, leaf)?;
                Ok(product(l, r, |_, _| Some(())))
            }
        }
    }

    fn unary(&self, cx: &mut FpcCx, cert: &Term, rule: Unary) -> Alts<Term> {
        match decode(cx, cert)? {
            Cert::Height(h) => match rule {
                Unary::Backchain(_) if h <= 0 => Ok(Vec::new()),
                Unary::Backchain(_) => one(node("height", [Term::Int(h - 1)])),
                _ => one(cert.clone()),
            },
            Cert::Sze(budget, out) => match rule {
                Unary::Backchain(_) => {
                    let n = int(cx, &budget)?;
                    Ok(if n > 0 {
                        vec![Alt::pass(node("sze", [Term::Int(n - 1), out]))]
                    } else {
                        Vec::new()
                    })
                }
                _ => one(cert.clone()),
            },
            Cert::Max(tree) => {
                let sub = cx.fresh();
                let (recorded, next) = match rule {
                    Unary::Some(w) => (node(max::SOME, [w.clone(), sub.clone()]), sub),
                    Unary::All(eigen) => (
                        node(max::ALL, [Term::abs(Term::app(sub.clone(), Term::Bound(0)))]),
                        Term::app(sub, eigen.clone()),
                    ),
                    Unary::Backchain(_) => (node(max::BACKCHAIN, [sub.clone()]), sub),
                    Unary::Imp => (node(max::IMP, [sub.clone()]), sub),
                    Unary::Limp => (node(max::LIMP, [sub.clone()]), sub),
                    Unary::Bang => (node(max::BANG, [sub.clone()]), sub),
                };
                Ok(vec![Alt::with(vec![(tree, recorded)], node("max", [next]))])
            }
            Cert::Random | Cert::Permissive => one(cert.clone()),
            Cert::NoWeight => match rule {
                Unary::Backchain(atom) => {
                    let pred = atom
                        .head_symbol()
                        .map(|s| s.as_str().to_string())
                        .unwrap_or_default();
                    let arms = cx.prog.preds.get(&pred).map_or(0, |d| d.disjuncts);
                    let weights = match cx.prog.weights.get(&pred) {
                        Some(ws) if ws.len() != arms => {
                            return Err(EngineError::MalformedBody(format!(
                                "{pred} has {arms} disjuncts but {} weights",
                                ws.len()
                            )))
                        }
                        Some(ws) => ws.clone(),
                        None => vec![1; arms],
                    };
                    let rnd = cx.rng.next_7bits();
                    one(node(
                        "cases",
                        [Term::Int(rnd as i64), cert_list(&weights), Term::Int(0)],
                    ))
                }
                _ => one(cert.clone()),
            },
            Cert::Cases { .. } => Err(EngineError::MalformedBody(format!(
                "weighted choice expects a disjunction: {}",
                cx.store.resolve(cert)
            ))),
            Cert::Collect(items, rest) => match rule {
                // Witnesses under a universal may mention its eigenvariable
                // and are left out of the level-0 item list.
                Unary::Some(w) if cx.level == 0 => {
                    let tail = cx.store.fresh_meta(0);
                    Ok(vec![Alt::with(
                        vec![(items, node(CERT_CONS, [w.clone(), tail.clone()]))],
                        node("collect", [tail, rest]),
                    )])
                }
                _ => one(cert.clone()),
            },
            Cert::Huniv(universe, rel) => match rule {
                Unary::Some(w) => {
                    let universe = items(cx, &universe)?;
                    Ok(candidates(&universe, rel)
                        .into_iter()
                        .map(|t| Alt::with(vec![(w.clone(), t)], cert.clone()))
                        .collect())
                }
                _ => one(cert.clone()),
            },
            Cert::Pair(a, b) => {
                let l = self.unary(cx, &a, rule)?;
                let r = self.unary(cx, &b, rule)?;
                Ok(product(l, r, |x, y| Some(pair(x.clone(), y.clone()))))
            }
        }
    }
}

impl Fpc for StdFpc {
    fn tt(&self, cx: &mut FpcCx, cert: &Term) -> Alts<()> {
        self.leaf(cx, cert, Leaf::Tt)
    }

    fn eq(&self, cx: &mut FpcCx, cert: &Term) -> Alts<()> {
        self.leaf(cx, cert, Leaf::Eq)
    }

    fn init(&self, cx: &mut FpcCx, cert: &Term) -> Alts<()> {
        self.leaf(cx, cert, Leaf::Init)
    }

    fn and(&self, cx: &mut FpcCx, cert: &Term) -> Alts<(Term, Term)> {
        match decode(cx, cert)? {
            Cert::Sze(budget, out) => {
                let mid = cx.store.fresh_meta(0);
                one((node("sze", [budget, mid.clone()]), node("sze", [mid, out])))
            }
            Cert::Max(tree) => {
                let (l, r) = (cx.fresh(), cx.fresh());
                Ok(vec![Alt::with(
                    vec![(tree, node(max::AND, [l.clone(), r.clone()]))],
                    (node("max", [l]), node("max", [r])),
                )])
            }
            Cert::Collect(items, rest) => {
                let mid = cx.store.fresh_meta(0);
                one((node("collect", [items, mid.clone()]), node("collect", [mid, rest])))
            }
            Cert::Cases { .. } => Err(EngineError::MalformedBody(format!(
                "weighted choice expects a disjunction: {}",
                cx.store.resolve(cert)
            ))),
            Cert::Pair(a, b) => {
                let l = self.and(cx, &a)?;
                let r = self.and(cx, &b)?;
                Ok(product(l, r, |(a1, a2), (b1, b2)| {
                    Some((pair(a1.clone(), b1.clone()), pair(a2.clone(), b2.clone())))
                }))
            }
            Cert::Height(_) | Cert::Random | Cert::NoWeight | Cert::Huniv(..) | Cert::Permissive => {
                one((cert.clone(), cert.clone()))
            }
        }
    }

    fn or(&self, cx: &mut FpcCx, cert: &Term) -> Alts<(Term, Side)> {
        let both = |c: &Term| Ok(vec![Alt::pass((c.clone(), Side::Left)), Alt::pass((c.clone(), Side::Right))]);
        match decode(cx, cert)? {
            Cert::Height(_) | Cert::Sze(..) | Cert::NoWeight | Cert::Collect(..) | Cert::Huniv(..) | Cert::Permissive => {
                both(cert)
            }
            Cert::Random => {
                let side = if cx.rng.next_bit() { Side::Right } else { Side::Left };
                one((cert.clone(), side))
            }
            Cert::Max(tree) => {
                let sub = cx.fresh();
                let next = node("max", [sub.clone()]);
                Ok([(1, Side::Left), (2, Side::Right)]
                    .into_iter()
                    .map(|(n, side)| {
                        Alt::with(
                            vec![(tree.clone(), node(max::OR, [Term::Int(n), sub.clone()]))],
                            (next.clone(), side),
                        )
                    })
                    .collect())
            }
            Cert::Cases { rnd, weights, acc } => {
                let Some((&w, rest)) = weights.split_first() else {
                    return Err(EngineError::MalformedBody("more disjuncts than weights".into()));
                };
                let total = acc + weights.iter().sum::<u32>();
                if rnd * total < 128 * (acc + w) {
                    one((node("noweight", []), Side::Left))
                } else {
                    let next = node("cases", [Term::Int(rnd as i64), cert_list(rest), Term::Int((acc + w) as i64)]);
                    one((next, Side::Right))
                }
            }
            Cert::Pair(a, b) => {
                let l = self.or(cx, &a)?;
                let r = self.or(cx, &b)?;
                Ok(product(l, r, |(ca, sa), (cb, sb)| {
                    (sa == sb).then(|| (pair(ca.clone(), cb.clone()), *sa))
                }))
            }
        }
    }

    fn some(&self, cx: &mut FpcCx, cert: &Term, witness: &Term) -> Alts<Term> {
        self.unary(cx, cert, Unary::Some(witness))
    }

    fn backchain(&self, cx: &mut FpcCx, cert: &Term, atom: &Term) -> Alts<Term> {
        self.unary(cx, cert, Unary::Backchain(atom))
    }

    fn imp(&self, cx: &mut FpcCx, cert: &Term) -> Alts<Term> {
        self.unary(cx, cert, Unary::Imp)
    }

    fn all(&self, cx: &mut FpcCx, cert: &Term, eigen: &Term) -> Alts<Term> {
        self.unary(cx, cert, Unary::All(eigen))
    }

    fn limp(&self, cx: &mut FpcCx, cert: &Term) -> Alts<Term> {
        self.unary(cx, cert, Unary::Limp)
    }

    fn bang(&self, cx: &mut FpcCx, cert: &Term) -> Alts<Term> {
        self.unary(cx, cert, Unary::Bang)
    }
}
