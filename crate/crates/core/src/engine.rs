//! The interpreter: depth-first, left-to-right proof search for goals in the
//! Horn, hereditary Harrop and linear fragments, plus negation as finite
//! failure.
//!
//! One machine serves every entry point. Linear search uses the I/O system:
//! the resource context is threaded through the proof and bounded atoms are
//! consumed in place (turned into [`Res::Del`]) rather than split eagerly.
//! Intuitionistic hypotheses are [`Res::Ubnd`] entries of the same context.
//! When a [`Frame::Prove`] carries a certificate, each rule first asks the
//! FPC, whose alternatives become choice points.

use crate::fpclib::RandomSource;
use crate::kernel::{Alt, Fpc, FpcCx, Side};
use crate::syntax::{Goal, Program, Query};
use crate::terms::{Mark, Store, Term};
use crate::unify::{unify, UnifyError};
use std::collections::VecDeque;
use std::rc::Rc;
use std::sync::Arc;
use thiserror::Error;

pub const DEFAULT_FUEL: u64 = 1_000_000;
/// Environment variable overriding [`DEFAULT_FUEL`].
pub const FUEL_ENV: &str = "PBT_FUEL";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("unknown predicate `{0}`")]
    UnknownPredicate(String),
    #[error("cannot select a clause for an atom with a variable head: {0}")]
    Flounder(String),
    #[error(transparent)]
    NonPattern(#[from] UnifyError),
    #[error("negated goal is not ground: {0} is unbound")]
    NonGroundNegation(String),
    #[error("search step budget exhausted")]
    FuelExhausted,
    #[error("ill-formed certificate: {0}")]
    BadCertificate(String),
    #[error("weighted certificate does not match the clause body: {0}")]
    MalformedBody(String),
}

/// An option-formula of the linear context.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Res {
    /// A consumed bounded atom.
    Del,
    /// Must be used exactly once.
    Bnd(Term),
    /// Reusable.
    Ubnd(Term),
}

/// Positions are stable: consumption replaces an entry by [`Res::Del`].
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct ResourceContext(pub Vec<Res>);

impl ResourceContext {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn unbounded(hyps: &[Term]) -> Self {
        ResourceContext(hyps.iter().cloned().map(Res::Ubnd).collect())
    }

    pub fn bounded(atoms: &[Term]) -> Self {
        ResourceContext(atoms.iter().cloned().map(Res::Bnd).collect())
    }

    pub fn bnd_count(&self) -> usize {
        self.0.iter().filter(|r| matches!(r, Res::Bnd(_))).count()
    }

    pub fn resolve(&self, store: &Store) -> Self {
        ResourceContext(
            self.0
                .iter()
                .map(|r| match r {
                    Res::Del => Res::Del,
                    Res::Bnd(t) => Res::Bnd(store.resolve(t)),
                    Res::Ubnd(t) => Res::Ubnd(store.resolve(t)),
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug)]
pub struct SearchOptions {
    /// Budget of backchain and init steps.
    pub fuel: u64,
    pub seed: u64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        let fuel = std::env::var(FUEL_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
            .filter(|f| *f > 0)
            .unwrap_or(DEFAULT_FUEL);
        SearchOptions { fuel, seed: 0 }
    }
}

#[derive(Clone, Debug)]
pub enum Frame {
    /// Prove a closed goal; `cert` absent means no FPC gating.
    Prove {
        goal: Arc<Goal>,
        cert: Option<Term>,
        level: u32,
    },
    /// Leave the scope of the hypothesis at `pos`; a linear one must have
    /// been consumed.
    PopHyp { pos: usize, linear: bool },
    /// End of a `!` goal: no bounded atom may have been consumed.
    BangEnd { bnd: usize },
}

impl Frame {
    pub fn prove(goal: Goal, cert: Option<Term>) -> Frame {
        Frame::Prove {
            goal: Arc::new(goal),
            cert,
            level: 0,
        }
    }
}

struct Node {
    frame: Frame,
    next: Cont,
}

type Cont = Option<Rc<Node>>;

fn push(cont: &mut Cont, frame: Frame) {
    *cont = Some(Rc::new(Node {
        frame,
        next: cont.take(),
    }));
}

/// Pushes `frames` so that `frames[0]` runs first.
fn push_all(cont: &mut Cont, frames: Vec<Frame>) {
    for f in frames.into_iter().rev() {
        push(cont, f);
    }
}

enum Action {
    Push(Vec<Frame>),
    Hyp(Res, Vec<Frame>),
    Init { pos: usize, consume: bool },
    Backchain {
        pred: String,
        args: Vec<Term>,
        cert: Option<Term>,
        level: u32,
    },
}

struct Branch {
    eqs: Vec<(Term, Term)>,
    action: Action,
}

struct Choicepoint {
    mark: Mark,
    cont: Cont,
    ctx: ResourceContext,
    branches: VecDeque<Branch>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Phase {
    Run,
    Backtrack,
    Done,
}

enum Outcome {
    Continue,
    Fail,
    Solution,
    FuelOut,
}

struct RunState {
    cont: Cont,
    ctx: ResourceContext,
    cps: Vec<Choicepoint>,
    fuel: u64,
    phase: Phase,
}

impl RunState {
    fn new(frames: Vec<Frame>, ctx: ResourceContext, fuel: u64) -> Self {
        let mut cont = None;
        push_all(&mut cont, frames);
        RunState {
            cont,
            ctx,
            cps: Vec::new(),
            fuel,
            phase: Phase::Run,
        }
    }
}

/// A search set aside by [`Search::enter`].
pub struct Suspended {
    state: RunState,
    mark: Mark,
}

/// A resumable search over one store.
pub struct Search<'a> {
    prog: &'a Program,
    fpc: Option<&'a dyn Fpc>,
    pub store: Store,
    pub rng: RandomSource,
    fuel: u64,
    st: RunState,
    steps: u64,
}

impl<'a> Search<'a> {
    pub fn new(prog: &'a Program, fpc: Option<&'a dyn Fpc>, opts: &SearchOptions) -> Self {
        Search {
            prog,
            fpc,
            store: Store::new(),
            rng: RandomSource::seeded(opts.seed),
            fuel: opts.fuel,
            st: RunState {
                phase: Phase::Done,
                ..RunState::new(Vec::new(), ResourceContext::new(), opts.fuel)
            },
            steps: 0,
        }
    }

    pub fn program(&self) -> &'a Program {
        self.prog
    }

    /// Fresh level-0 metavariables for `vars`.
    pub fn fresh_vars(&mut self, vars: &[String]) -> Vec<Term> {
        vars.iter().map(|_| self.store.fresh_meta(0)).collect()
    }

    /// Starts a new search; earlier choice points are dropped.
    pub fn start(&mut self, frames: Vec<Frame>, ctx: ResourceContext) {
        self.st = RunState::new(frames, ctx, self.fuel);
    }

    /// Backchain and init steps taken so far.
    pub fn steps(&self) -> u64 {
        self.steps
    }

    /// The current resource context (meaningful right after a solution).
    pub fn context(&self) -> &ResourceContext {
        &self.st.ctx
    }

    /// Runs to the next solution; `Ok(false)` once the search space is
    /// exhausted. After a solution, bindings are read from the store.
    pub fn next_solution(&mut self) -> Result<bool, EngineError> {
        loop {
            let outcome = match self.st.phase {
                Phase::Done => return Ok(false),
                Phase::Run => self.run(),
                Phase::Backtrack => self.resume(),
            };
            let outcome = match outcome {
                Ok(o) => o,
                Err(e) => {
                    self.st.phase = Phase::Done;
                    return Err(e);
                }
            };
            match outcome {
                Outcome::Continue => self.st.phase = Phase::Run,
                Outcome::Fail => {
                    if self.st.cps.is_empty() {
                        self.st.phase = Phase::Done;
                        return Ok(false);
                    }
                    self.st.phase = Phase::Backtrack;
                }
                Outcome::Solution => {
                    self.st.phase = Phase::Backtrack;
                    return Ok(true);
                }
                Outcome::FuelOut => {
                    self.st.phase = Phase::Done;
                    return Err(EngineError::FuelExhausted);
                }
            }
        }
    }

    /// Negation as finite failure of the closed goal `goal`, searched without
    /// certificate on the current store (left unchanged) within `fuel` steps.
    pub fn naf(&mut self, goal: &Goal, ctx: ResourceContext, fuel: u64) -> Result<bool, EngineError> {
        let mut unbound = None;
        goal.visit_terms(0, &mut |t, _| {
            if unbound.is_none() {
                unbound = self.store.first_unbound(t);
            }
        });
        if let Some(m) = unbound {
            return Err(EngineError::NonGroundNegation(format!("_G{}", m.0)));
        }
        let saved = self.enter(vec![Frame::prove(goal.clone(), None)], ctx, fuel);
        let found = self.next_solution();
        self.leave(saved);
        Ok(!found?)
    }

    /// Sets the current search aside and starts a nested one on the same
    /// store with its own step budget.
    pub fn enter(&mut self, frames: Vec<Frame>, ctx: ResourceContext, fuel: u64) -> Suspended {
        let mark = self.store.mark();
        let inner = RunState::new(frames, ctx, fuel);
        Suspended {
            state: std::mem::replace(&mut self.st, inner),
            mark,
        }
    }

    /// Resumes the search set aside by `enter`, undoing every binding made
    /// since.
    pub fn leave(&mut self, saved: Suspended) {
        self.st = saved.state;
        self.store.undo(saved.mark);
    }

    fn pop_frame(&mut self) -> Option<Frame> {
        let node = self.st.cont.take()?;
        self.st.cont = node.next.clone();
        Some(node.frame.clone())
    }

    fn run(&mut self) -> Result<Outcome, EngineError> {
        while let Some(frame) = self.pop_frame() {
            let o = match frame {
                Frame::Prove { goal, cert, level } => self.prove(&goal, cert, level)?,
                Frame::PopHyp { pos, linear } => {
                    if linear && self.st.ctx.0[pos] != Res::Del {
                        Outcome::Fail
                    } else {
                        self.st.ctx.0.truncate(pos);
                        Outcome::Continue
                    }
                }
                Frame::BangEnd { bnd } => {
                    if self.st.ctx.bnd_count() == bnd {
                        Outcome::Continue
                    } else {
                        Outcome::Fail
                    }
                }
            };
            if !matches!(o, Outcome::Continue) {
                return Ok(o);
            }
        }
        Ok(Outcome::Solution)
    }

    /// Takes the next branch of the most recent choice point.
    fn resume(&mut self) -> Result<Outcome, EngineError> {
        let Some(idx) = self.st.cps.len().checked_sub(1) else {
            return Ok(Outcome::Fail);
        };
        let cp = &mut self.st.cps[idx];
        let Some(branch) = cp.branches.pop_front() else {
            self.st.cps.pop();
            return Ok(Outcome::Fail);
        };
        self.store.undo(cp.mark);
        self.st.cont = cp.cont.clone();
        self.st.ctx = cp.ctx.clone();
        if cp.branches.is_empty() {
            self.st.cps.pop();
        }
        self.apply(branch)
    }

    fn branch(&mut self, mut branches: Vec<Branch>) -> Result<Outcome, EngineError> {
        match branches.len() {
            0 => Ok(Outcome::Fail),
            1 => self.apply(branches.pop().expect("one branch")),
            _ => {
                let mut rest: VecDeque<Branch> = branches.into();
                let first = rest.pop_front().expect("several branches");
                self.st.cps.push(Choicepoint {
                    mark: self.store.mark(),
                    cont: self.st.cont.clone(),
                    ctx: self.st.ctx.clone(),
                    branches: rest,
                });
                self.apply(first)
            }
        }
    }

    fn apply(&mut self, branch: Branch) -> Result<Outcome, EngineError> {
        if matches!(branch.action, Action::Init { .. } | Action::Backchain { .. }) {
            if self.st.fuel == 0 {
                return Ok(Outcome::FuelOut);
            }
            self.st.fuel -= 1;
            self.steps += 1;
        }
        for (a, b) in &branch.eqs {
            if !unify(&mut self.store, a, b)? {
                return Ok(Outcome::Fail);
            }
        }
        match branch.action {
            Action::Push(frames) => push_all(&mut self.st.cont, frames),
            Action::Hyp(res, frames) => {
                self.st.ctx.0.push(res);
                push_all(&mut self.st.cont, frames);
            }
            Action::Init { pos, consume } => {
                if consume {
                    self.st.ctx.0[pos] = Res::Del;
                }
            }
            Action::Backchain { pred, args, cert, level } => {
                let def = &self.prog.preds[&pred];
                let body = def.completed.body.instantiate(&args);
                push(
                    &mut self.st.cont,
                    Frame::Prove {
                        goal: Arc::new(body),
                        cert,
                        level,
                    },
                );
            }
        }
        Ok(Outcome::Continue)
    }

    fn cx(&mut self, level: u32) -> FpcCx<'_> {
        FpcCx {
            store: &mut self.store,
            prog: self.prog,
            rng: &mut self.rng,
            level,
        }
    }

    fn gated<T>(
        &mut self,
        level: u32,
        ask: impl FnOnce(&dyn Fpc, &mut FpcCx) -> Result<Vec<Alt<T>>, EngineError>,
        mut make: impl FnMut(T) -> Action,
        extra: Option<(Term, Term)>,
    ) -> Result<Outcome, EngineError> {
        let fpc = self.fpc.ok_or_else(|| EngineError::BadCertificate("certificate given without an FPC".into()))?;
        let alts = ask(fpc, &mut self.cx(level))?;
        let branches = alts
            .into_iter()
            .map(|alt| {
                let mut eqs = alt.eqs;
                eqs.extend(extra.clone());
                Branch {
                    eqs,
                    action: make(alt.out),
                }
            })
            .collect();
        self.branch(branches)
    }

    fn prove(&mut self, goal: &Goal, cert: Option<Term>, level: u32) -> Result<Outcome, EngineError> {
        let prove = |g: &Arc<Goal>, cert: Option<Term>, level: u32| Frame::Prove {
            goal: g.clone(),
            cert,
            level,
        };
        let Some(c) = cert else {
            return match goal {
                Goal::Tt => Ok(Outcome::Continue),
                Goal::Ff => Ok(Outcome::Fail),
                Goal::Eq(a, b) => Ok(if unify(&mut self.store, a, b)? {
                    Outcome::Continue
                } else {
                    Outcome::Fail
                }),
                Goal::And(a, b) => {
                    push_all(&mut self.st.cont, vec![prove(a, None, level), prove(b, None, level)]);
                    Ok(Outcome::Continue)
                }
                Goal::Or(a, b) => self.branch(vec![
                    Branch {
                        eqs: Vec::new(),
                        action: Action::Push(vec![prove(a, None, level)]),
                    },
                    Branch {
                        eqs: Vec::new(),
                        action: Action::Push(vec![prove(b, None, level)]),
                    },
                ]),
                Goal::Some(body) => {
                    let w = self.store.fresh_meta(level);
                    push(&mut self.st.cont, Frame::Prove {
                        goal: Arc::new(body.instantiate(&[w])),
                        cert: None,
                        level,
                    });
                    Ok(Outcome::Continue)
                }
                Goal::All(body) => {
                    let e = self.store.fresh_eigen(level + 1);
                    push(&mut self.st.cont, Frame::Prove {
                        goal: Arc::new(body.instantiate(&[e])),
                        cert: None,
                        level: level + 1,
                    });
                    Ok(Outcome::Continue)
                }
                Goal::ImpI(a, g) | Goal::ImpL(a, g) => {
                    let linear = matches!(goal, Goal::ImpL(..));
                    let pos = self.st.ctx.0.len();
                    let res = if linear { Res::Bnd(a.clone()) } else { Res::Ubnd(a.clone()) };
                    self.st.ctx.0.push(res);
                    push_all(&mut self.st.cont, vec![prove(g, None, level), Frame::PopHyp { pos, linear }]);
                    Ok(Outcome::Continue)
                }
                Goal::Bang(g) => {
                    let bnd = self.st.ctx.bnd_count();
                    push_all(&mut self.st.cont, vec![prove(g, None, level), Frame::BangEnd { bnd }]);
                    Ok(Outcome::Continue)
                }
                Goal::Atom(t) => self.atom(t, None, level),
            };
        };
        match goal {
            Goal::Tt => self.gated(level, |f, cx| f.tt(cx, &c), |_| Action::Push(Vec::new()), None),
            Goal::Ff => Ok(Outcome::Fail),
            Goal::Eq(a, b) => self.gated(
                level,
                |f, cx| f.eq(cx, &c),
                |_| Action::Push(Vec::new()),
                Some((a.clone(), b.clone())),
            ),
            Goal::And(a, b) => self.gated(
                level,
                |f, cx| f.and(cx, &c),
                |(c1, c2)| Action::Push(vec![prove(a, Some(c1), level), prove(b, Some(c2), level)]),
                None,
            ),
            Goal::Or(a, b) => self.gated(
                level,
                |f, cx| f.or(cx, &c),
                |(c1, side)| {
                    let g = if side == Side::Left { a } else { b };
                    Action::Push(vec![prove(g, Some(c1), level)])
                },
                None,
            ),
            Goal::Some(body) => {
                let w = self.store.fresh_meta(level);
                let g = Arc::new(body.instantiate(std::slice::from_ref(&w)));
                self.gated(
                    level,
                    |f, cx| f.some(cx, &c, &w),
                    |c1| Action::Push(vec![prove(&g, Some(c1), level)]),
                    None,
                )
            }
            Goal::All(body) => {
                let e = self.store.fresh_eigen(level + 1);
                let g = Arc::new(body.instantiate(std::slice::from_ref(&e)));
                self.gated(
                    level,
                    |f, cx| f.all(cx, &c, &e),
                    |c1| Action::Push(vec![prove(&g, Some(c1), level + 1)]),
                    None,
                )
            }
            Goal::ImpI(a, g) | Goal::ImpL(a, g) => {
                let linear = matches!(goal, Goal::ImpL(..));
                let pos = self.st.ctx.0.len();
                let res = if linear { Res::Bnd(a.clone()) } else { Res::Ubnd(a.clone()) };
                self.gated(
                    level,
                    |f, cx| if linear { f.limp(cx, &c) } else { f.imp(cx, &c) },
                    |c1| Action::Hyp(res.clone(), vec![prove(g, Some(c1), level), Frame::PopHyp { pos, linear }]),
                    None,
                )
            }
            Goal::Bang(g) => {
                let bnd = self.st.ctx.bnd_count();
                self.gated(
                    level,
                    |f, cx| f.bang(cx, &c),
                    |c1| Action::Push(vec![prove(g, Some(c1), level), Frame::BangEnd { bnd }]),
                    None,
                )
            }
            Goal::Atom(t) => self.atom(t, Some(c), level),
        }
    }

    /// Hypotheses (most recent first), then axioms, then the program clause.
    fn atom(&mut self, t: &Term, cert: Option<Term>, level: u32) -> Result<Outcome, EngineError> {
        let atom = self.store.whnf(t);
        let (head, args) = atom.spine();
        let pred = match head {
            Term::Const(p) => p.as_str().to_string(),
            _ => return Err(EngineError::Flounder(self.store.resolve(&atom).to_string())),
        };
        let arity = args.len();
        let args: Vec<Term> = args.into_iter().cloned().collect();
        let Some(def) = self.prog.preds.get(&pred) else {
            return Err(EngineError::UnknownPredicate(pred));
        };
        if def.arity != arity {
            return Err(EngineError::UnknownPredicate(format!("{pred}/{arity}")));
        }

        let matching: Vec<(usize, Term, bool)> = self
            .st
            .ctx
            .0
            .iter()
            .enumerate()
            .rev()
            .filter_map(|(pos, r)| match r {
                Res::Bnd(h) => Some((pos, h.clone(), true)),
                Res::Ubnd(h) => Some((pos, h.clone(), false)),
                Res::Del => None,
            })
            .filter(|(_, h, _)| {
                let h = self.store.whnf(h);
                let (hh, hargs) = h.spine();
                hh.head_symbol().is_some_and(|s| s.as_str() == pred) && hargs.len() == arity
            })
            .collect();
        let is_axiom = self.prog.axioms.contains_key(&pred);
        let has_clauses = def.disjuncts > 0;

        let mut branches = Vec::new();
        match &cert {
            None => {
                for (pos, h, consume) in matching {
                    branches.push(Branch {
                        eqs: vec![(atom.clone(), h)],
                        action: Action::Init { pos, consume },
                    });
                }
                if is_axiom {
                    branches.push(Branch {
                        eqs: Vec::new(),
                        action: Action::Push(Vec::new()),
                    });
                }
                if has_clauses {
                    branches.push(Branch {
                        eqs: Vec::new(),
                        action: Action::Backchain {
                            pred,
                            args,
                            cert: None,
                            level,
                        },
                    });
                }
            }
            Some(c) => {
                let fpc = self
                    .fpc
                    .ok_or_else(|| EngineError::BadCertificate("certificate given without an FPC".into()))?;
                if !matching.is_empty() {
                    let alts = fpc.init(&mut self.cx(level), c)?;
                    for (pos, h, consume) in matching {
                        for alt in &alts {
                            let mut eqs = alt.eqs.clone();
                            eqs.push((atom.clone(), h.clone()));
                            branches.push(Branch {
                                eqs,
                                action: Action::Init { pos, consume },
                            });
                        }
                    }
                }
                if is_axiom {
                    for alt in fpc.tt(&mut self.cx(level), c)? {
                        branches.push(Branch {
                            eqs: alt.eqs,
                            action: Action::Push(Vec::new()),
                        });
                    }
                }
                if has_clauses {
                    for alt in fpc.backchain(&mut self.cx(level), c, &atom)? {
                        branches.push(Branch {
                            eqs: alt.eqs,
                            action: Action::Backchain {
                                pred: pred.clone(),
                                args: args.clone(),
                                cert: Some(alt.out),
                                level,
                            },
                        });
                    }
                }
            }
        }
        self.branch(branches)
    }
}

/// A solution of a query: resolved bindings of its free variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Solution {
    pub bindings: Vec<(String, Term)>,
    /// The output context of a linear search.
    pub ctx: ResourceContext,
    /// The resolved certificate, when the search was checked.
    pub cert: Option<Term>,
}

impl Solution {
    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.iter().find(|(v, _)| v == var).map(|(_, t)| t)
    }
}

/// Lazy stream of solutions.
pub struct Solutions<'a> {
    search: Search<'a>,
    vars: Vec<(String, Term)>,
    cert: Option<Term>,
    done: bool,
}

impl<'a> Solutions<'a> {
    pub fn new(mut search: Search<'a>, query: &Query, cert: Option<Term>, ctx: ResourceContext) -> Self {
        let metas = search.fresh_vars(&query.vars);
        let goal = query.goal.instantiate(&metas);
        search.start(vec![Frame::prove(goal, cert.clone())], ctx);
        let vars = query.vars.iter().cloned().zip(metas).filter(|(v, _)| !v.starts_with('$')).collect();
        Solutions {
            search,
            vars,
            cert,
            done: false,
        }
    }

    pub fn search(&self) -> &Search<'a> {
        &self.search
    }
}

impl Iterator for Solutions<'_> {
    type Item = Result<Solution, EngineError>;

    fn next(&mut self) -> Option<Self::Item> {
        if self.done {
            return None;
        }
        match self.search.next_solution() {
            Ok(true) => {
                let st = &self.search.store;
                Some(Ok(Solution {
                    bindings: self.vars.iter().map(|(v, m)| (v.clone(), st.resolve(m))).collect(),
                    ctx: self.search.context().resolve(st),
                    cert: self.cert.as_ref().map(|c| st.resolve(c)),
                }))
            }
            Ok(false) => {
                self.done = true;
                None
            }
            Err(e) => {
                self.done = true;
                Some(Err(e))
            }
        }
    }
}

/// Enumerates the solutions of `query` with intuitionistic hypotheses `hyps`
/// in depth-first, left-to-right order.
pub fn solve<'a>(prog: &'a Program, hyps: &[Term], query: &Query, opts: &SearchOptions) -> Solutions<'a> {
    ll_solve(prog, ResourceContext::unbounded(hyps), query, opts)
}

/// Linear search from the input context `ctx`; each solution carries the
/// output context.
pub fn ll_solve<'a>(prog: &'a Program, ctx: ResourceContext, query: &Query, opts: &SearchOptions) -> Solutions<'a> {
    Solutions::new(Search::new(prog, None, opts), query, None, ctx)
}

/// Negation as finite failure of a query whose goal must be ground.
pub fn naf(prog: &Program, hyps: &[Term], query: &Query, fuel: u64) -> Result<bool, EngineError> {
    let opts = SearchOptions { fuel, seed: 0 };
    let mut search = Search::new(prog, None, &opts);
    let metas = search.fresh_vars(&query.vars);
    let goal = query.goal.instantiate(&metas);
    search.naf(&goal, ResourceContext::unbounded(hyps), fuel)
}
