//! The property-based testing driver. A property `gen: G. when: W. then: T.`
//! is refuted by a proof of `G` that fits the certificate, a solution of `W`,
//! and finite failure of `T`.

use crate::engine::{EngineError, Frame, ResourceContext, Search, SearchOptions};
use crate::fpclib::{max, RandomSource};
use crate::kernel::Fpc;
use crate::syntax::{parse_cert, parse_term, Goal, Mode, Program, PropertySpec, SyntaxError};
use crate::terms::{prune_subsumed, Term};
use log::{debug, warn};
use std::collections::{HashSet, VecDeque};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("no property named `{0}`")]
    UnknownProperty(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("property {prop}: {source}")]
    Engine {
        prop: String,
        #[source]
        source: EngineError,
    },
    #[error("property {prop}: negated goal is not ground, {vars} unbound")]
    NonGroundNegation { prop: String, vars: String },
    #[error("property {0}: shrinking needs first-order witnesses (a horn program)")]
    ShrinkUnsupported(String),
    #[error("property {0}: the stored bindings do not replay to a proof of the generator")]
    NotReplayable(String),
}

/// Resource limits of a property run.
#[derive(Clone, Debug)]
pub struct Limits {
    /// Step budget of the generation search, and separately of each
    /// premise search and each negation.
    pub fuel: u64,
    /// Stop after this many counterexamples.
    pub max_counterexamples: Option<usize>,
    /// Stop after this many generated cases.
    pub max_cases: Option<usize>,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            fuel: SearchOptions::default().fuel,
            max_counterexamples: None,
            max_cases: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub prop: String,
    /// Every property variable, resolved. Wildcards are left out.
    pub bindings: Vec<(String, Term)>,
    /// The generating certificate as the proof left it.
    pub cert: Term,
    pub seed: u64,
    /// The height bound of the deepening round that found it.
    pub bound: Option<u32>,
}

impl Counterexample {
    pub fn get(&self, var: &str) -> Option<&Term> {
        self.bindings.iter().find(|(v, _)| v == var).map(|(_, t)| t)
    }
}

fn is_reported(var: &str) -> bool {
    !var.starts_with('$')
}

/// Lazy generate-and-test run of one property under one certificate.
pub struct PropertyRun<'a> {
    search: Search<'a>,
    spec: &'a PropertySpec,
    metas: Vec<Term>,
    cert: Term,
    seed: u64,
    limits: Limits,
    pending: VecDeque<Counterexample>,
    seen: HashSet<Vec<(String, Term)>>,
    emitted: usize,
    done: bool,
    /// Generator proofs tested so far.
    pub generated: usize,
    /// Test cases abandoned because a premise search or a negation ran out
    /// of fuel.
    pub discards: usize,
}

impl<'a> PropertyRun<'a> {
    pub fn new(
        prog: &'a Program,
        fpc: &'a dyn Fpc,
        spec: &'a PropertySpec,
        cert: &str,
        opts: &SearchOptions,
        limits: &Limits,
    ) -> Result<Self, HarnessError> {
        let opts = SearchOptions {
            fuel: limits.fuel,
            seed: opts.seed,
        };
        let mut search = Search::new(prog, Some(fpc), &opts);
        let cert = parse_cert(cert, prog, &mut search.store)?;
        let metas = search.fresh_vars(&spec.vars);
        let gen = spec.gen.instantiate(&metas);
        search.start(vec![Frame::prove(gen, Some(cert.clone()))], ResourceContext::new());
        Ok(PropertyRun {
            search,
            spec,
            metas,
            cert,
            seed: opts.seed,
            limits: limits.clone(),
            pending: VecDeque::new(),
            seen: HashSet::new(),
            emitted: 0,
            done: false,
            generated: 0,
            discards: 0,
        })
    }

    /// Replaces the random source of the generation search.
    pub fn with_rng(mut self, rng: RandomSource) -> Self {
        self.search.rng = rng;
        self
    }

    fn fail(&self, source: EngineError) -> HarnessError {
        HarnessError::Engine {
            prop: self.spec.name.clone(),
            source,
        }
    }

    fn bindings(&self) -> Vec<(String, Term)> {
        self.spec
            .vars
            .iter()
            .zip(&self.metas)
            .filter(|(v, _)| is_reported(v))
            .map(|(v, m)| (v.clone(), self.search.store.resolve(m)))
            .collect()
    }

    /// Tests the current generator proof, queueing its counterexamples.
    fn test_case(&mut self) -> Result<(), HarnessError> {
        self.generated += 1;
        let cert = self.search.store.resolve(&self.cert);
        let Some(when) = &self.spec.when else {
            return self.refute(&cert);
        };
        let when = when.instantiate(&self.metas);
        let saved = self.search.enter(vec![Frame::prove(when, None)], ResourceContext::new(), self.limits.fuel);
        let mut result = Ok(());
        loop {
            match self.search.next_solution() {
                Ok(true) => {
                    if let Err(e) = self.refute(&cert) {
                        result = Err(e);
                        break;
                    }
                }
                Ok(false) => break,
                Err(EngineError::FuelExhausted) => {
                    warn!("{}: premise search ran out of fuel; case skipped", self.spec.name);
                    self.discards += 1;
                    break;
                }
                Err(e) => {
                    result = Err(self.fail(e));
                    break;
                }
            }
        }
        self.search.leave(saved);
        result
    }

    fn refute(&mut self, cert: &Term) -> Result<(), HarnessError> {
        let then = self.spec.then.instantiate(&self.metas);
        match self.search.naf(&then, ResourceContext::new(), self.limits.fuel) {
            Ok(true) => {
                let bindings = self.bindings();
                if self.seen.insert(bindings.clone()) {
                    self.pending.push_back(Counterexample {
                        prop: self.spec.name.clone(),
                        bindings,
                        cert: cert.clone(),
                        seed: self.seed,
                        bound: None,
                    });
                }
                Ok(())
            }
            Ok(false) => Ok(()),
            Err(EngineError::FuelExhausted) => {
                warn!("{}: negation ran out of fuel; case skipped", self.spec.name);
                self.discards += 1;
                Ok(())
            }
            Err(EngineError::NonGroundNegation(_)) => {
                let vars: Vec<&str> = self
                    .spec
                    .vars
                    .iter()
                    .zip(&self.metas)
                    .filter(|(v, m)| is_reported(v) && self.search.store.resolve(m).has_meta())
                    .map(|(v, _)| v.as_str())
                    .collect();
                Err(HarnessError::NonGroundNegation {
                    prop: self.spec.name.clone(),
                    vars: vars.join(", "),
                })
            }
            Err(e) => Err(self.fail(e)),
        }
    }
}

impl Iterator for PropertyRun<'_> {
    type Item = Result<Counterexample, HarnessError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.limits.max_counterexamples.is_some_and(|n| self.emitted >= n) {
                return None;
            }
            if let Some(cex) = self.pending.pop_front() {
                self.emitted += 1;
                return Some(Ok(cex));
            }
            if self.done || self.limits.max_cases.is_some_and(|n| self.generated >= n) {
                return None;
            }
            match self.search.next_solution() {
                Ok(true) => {
                    if let Err(e) = self.test_case() {
                        self.done = true;
                        return Some(Err(e));
                    }
                }
                Ok(false) => self.done = true,
                Err(e) => {
                    self.done = true;
                    return Some(Err(self.fail(e)));
                }
            }
        }
    }
}

pub fn property<'a>(prog: &'a Program, name: &str) -> Result<&'a PropertySpec, HarnessError> {
    prog.prop(name).ok_or_else(|| HarnessError::UnknownProperty(name.to_string()))
}

/// Runs `spec` once under `cert`, collecting every counterexample.
pub fn run_property(
    prog: &Program,
    fpc: &dyn Fpc,
    spec: &PropertySpec,
    cert: &str,
    opts: &SearchOptions,
    limits: &Limits,
) -> Result<Vec<Counterexample>, HarnessError> {
    PropertyRun::new(prog, fpc, spec, cert, opts, limits)?.collect()
}

/// The certificate of one deepening round.
pub fn deepen_cert(height: u32, size_factor: Option<u32>) -> String {
    match size_factor {
        Some(k) => format!("height {height} <c> sze {} _", height * k),
        None => format!("height {height}"),
    }
}

/// Iterative deepening over heights `lo..=hi`. Each counterexample is
/// reported once, tagged with the first bound that finds it.
pub struct Deepen<'a> {
    prog: &'a Program,
    fpc: &'a dyn Fpc,
    spec: &'a PropertySpec,
    opts: SearchOptions,
    limits: Limits,
    size_factor: Option<u32>,
    next_bound: u32,
    hi: u32,
    current: Option<(u32, PropertyRun<'a>)>,
    seen: HashSet<Vec<(String, Term)>>,
    emitted: usize,
    /// Generated cases and discards over all finished and current rounds.
    pub generated: usize,
    pub discards: usize,
}

impl<'a> Deepen<'a> {
    pub fn new(
        prog: &'a Program,
        fpc: &'a dyn Fpc,
        spec: &'a PropertySpec,
        (lo, hi): (u32, u32),
        size_factor: Option<u32>,
        opts: &SearchOptions,
        limits: &Limits,
    ) -> Self {
        Deepen {
            prog,
            fpc,
            spec,
            opts: opts.clone(),
            limits: limits.clone(),
            size_factor,
            next_bound: lo,
            hi,
            current: None,
            seen: HashSet::new(),
            emitted: 0,
            generated: 0,
            discards: 0,
        }
    }

    fn finish_round(&mut self) {
        if let Some((_, run)) = self.current.take() {
            self.generated += run.generated;
            self.discards += run.discards;
        }
    }
}

impl Iterator for Deepen<'_> {
    type Item = Result<Counterexample, HarnessError>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            if self.limits.max_counterexamples.is_some_and(|n| self.emitted >= n) {
                self.finish_round();
                return None;
            }
            if self.current.is_none() {
                if self.next_bound > self.hi {
                    return None;
                }
                let h = self.next_bound;
                self.next_bound += 1;
                debug!("{}: deepening to height {h}", self.spec.name);
                let limits = Limits {
                    max_counterexamples: None,
                    ..self.limits.clone()
                };
                let cert = deepen_cert(h, self.size_factor);
                match PropertyRun::new(self.prog, self.fpc, self.spec, &cert, &self.opts, &limits) {
                    Ok(run) => self.current = Some((h, run)),
                    Err(e) => return Some(Err(e)),
                }
            }
            let (h, run) = self.current.as_mut().expect("round in progress");
            let h = *h;
            match run.next() {
                Some(Ok(mut cex)) => {
                    if self.seen.insert(cex.bindings.clone()) {
                        cex.bound = Some(h);
                        self.emitted += 1;
                        return Some(Ok(cex));
                    }
                }
                Some(Err(e)) => {
                    self.finish_round();
                    self.next_bound = self.hi + 1;
                    return Some(Err(e));
                }
                None => self.finish_round(),
            }
        }
    }
}

/// Result of random sampling.
#[derive(Clone, Debug, Default)]
pub struct SampleReport {
    /// The generator bindings of each successful attempt, in attempt order.
    pub values: Vec<Vec<(String, Term)>>,
    pub counterexamples: Vec<Counterexample>,
    /// Attempts whose generation failed or ran out of fuel, plus abandoned
    /// test cases.
    pub discards: usize,
}

/// `n` independent generation attempts under `cert` (typically weighted),
/// the `i`-th drawing from stream `i` of `seed`. Each attempt tests its first
/// generated case only.
pub fn sample(
    prog: &Program,
    fpc: &dyn Fpc,
    spec: &PropertySpec,
    cert: &str,
    n: usize,
    seed: u64,
    limits: &Limits,
) -> Result<SampleReport, HarnessError> {
    let mut report = SampleReport::default();
    let gen_vars: Vec<String> = {
        let mut occurs = vec![false; spec.vars.len()];
        let depth = spec.vars.len() as u32;
        spec.gen.visit_terms(0, &mut |t, d| mark_outer(t, d, depth, &mut occurs));
        spec.vars
            .iter()
            .zip(occurs)
            .filter(|(v, o)| *o && is_reported(v))
            .map(|(v, _)| v.clone())
            .collect()
    };
    let limits = Limits {
        max_cases: Some(1),
        max_counterexamples: None,
        ..limits.clone()
    };
    for i in 0..n {
        let opts = SearchOptions { fuel: limits.fuel, seed };
        let mut run = PropertyRun::new(prog, fpc, spec, cert, &opts, &limits)?.with_rng(RandomSource::split(seed, i as u64));
        let mut found = Vec::new();
        let mut failed = false;
        for r in run.by_ref() {
            match r {
                Ok(cex) => found.push(cex),
                Err(HarnessError::Engine {
                    source: EngineError::FuelExhausted,
                    ..
                }) => failed = true,
                Err(e) => return Err(e),
            }
        }
        if failed || run.generated == 0 {
            report.discards += 1;
            continue;
        }
        report.discards += run.discards;
        let values = run
            .bindings()
            .into_iter()
            .filter(|(v, _)| gen_vars.contains(v))
            .collect();
        report.values.push(values);
        report.counterexamples.extend(found);
    }
    Ok(report)
}

/// Marks which of `outer` enclosing variables occur in `t`.
fn mark_outer(t: &Term, depth: u32, outer: u32, seen: &mut [bool]) {
    match t {
        Term::Bound(i) if *i >= depth && i - depth < outer => seen[(outer - 1 - (i - depth)) as usize] = true,
        Term::App(f, a) => {
            mark_outer(f, depth, outer, seen);
            mark_outer(a, depth, outer, seen);
        }
        Term::Abs(b) => mark_outer(b, depth + 1, outer, seen),
        _ => {}
    }
}

/// Number of decide steps (backchains and inits) on the longest branch of a
/// resolved `max` tree.
pub fn tree_height(tree: &Term) -> u32 {
    let (head, args) = tree.spine();
    let here = match head.head_symbol().map(|s| s.as_str()) {
        Some(max::BACKCHAIN) | Some(max::INIT) => 1,
        _ => 0,
    };
    let below = args
        .iter()
        .map(|a| match a {
            Term::Abs(body) => tree_height(body),
            a => tree_height(a),
        })
        .max()
        .unwrap_or(0);
    here + below
}

/// Fixes the counterexample's bindings in the generator goal.
fn pinned_generator(spec: &PropertySpec, cex: &Counterexample, search: &mut Search) -> Goal {
    let args: Vec<Term> = spec
        .vars
        .iter()
        .map(|v| cex.get(v).cloned().unwrap_or_else(|| search.store.fresh_meta(0)))
        .collect();
    spec.gen.instantiate(&args)
}

/// Elaborates the generator proof of `cex` under `cert`, returning the
/// resolved certificate of the first proof.
fn elaborate(
    prog: &Program,
    fpc: &dyn Fpc,
    spec: &PropertySpec,
    cex: &Counterexample,
    cert: &str,
    fuel: u64,
) -> Result<Term, HarnessError> {
    let opts = SearchOptions { fuel, seed: cex.seed };
    let mut search = Search::new(prog, Some(fpc), &opts);
    let cert = parse_cert(cert, prog, &mut search.store)?;
    let gen = pinned_generator(spec, cex, &mut search);
    search.start(vec![Frame::prove(gen, Some(cert.clone()))], ResourceContext::new());
    match search.next_solution() {
        Ok(true) => Ok(search.store.resolve(&cert)),
        Ok(false) => Err(HarnessError::NotReplayable(spec.name.clone())),
        Err(source) => Err(HarnessError::Engine {
            prop: spec.name.clone(),
            source,
        }),
    }
}

/// The witnesses of the generator proof of `cex` with subsumed ones pruned,
/// and the proof's height.
pub fn collect_items(
    prog: &Program,
    fpc: &dyn Fpc,
    spec: &PropertySpec,
    cex: &Counterexample,
    fuel: u64,
) -> Result<(Vec<Term>, u32), HarnessError> {
    let cert = elaborate(prog, fpc, spec, cex, "collect Is <c> max T", fuel)?;
    let (_, args) = cert.spine();
    let (collect, tree) = (args[0].clone(), args[1].clone());
    let mut items = Vec::new();
    let mut cur = collect.spine().1[0].clone();
    while let (_, [x, rest]) = (&cur.clone(), cur.spine().1.as_slice()) {
        items.push((*x).clone());
        cur = (*rest).clone();
    }
    let tree = tree.spine().1[0].clone();
    Ok((prune_subsumed(&items), tree_height(&tree)))
}

fn universe(items: &[Term]) -> String {
    let shown: Vec<String> = items.iter().map(|t| t.to_string()).collect();
    format!("[{}]", shown.join(", "))
}

/// Shrinks a counterexample: repeatedly searches for a counterexample one
/// height lower whose witnesses are subterms of the current proof's
/// witnesses, then tries proper subterms at the same height, until neither
/// search succeeds.
pub fn shrink(
    prog: &Program,
    fpc: &dyn Fpc,
    spec: &PropertySpec,
    cex: &Counterexample,
    limits: &Limits,
) -> Result<Counterexample, HarnessError> {
    if prog.mode != Mode::Horn {
        return Err(HarnessError::ShrinkUnsupported(spec.name.clone()));
    }
    let mut current = cex.clone();
    let (mut items, mut height) = collect_items(prog, fpc, spec, &current, limits.fuel)?;
    loop {
        let mut attempts = Vec::new();
        if height > 0 {
            attempts.push(("subterm", height - 1));
        }
        attempts.push(("proper", height));
        let mut adopted = false;
        for (rel, h) in attempts {
            let cert = format!("huniv {} {rel} <c> height {h} <c> max _", universe(&items));
            let first_limits = Limits {
                max_counterexamples: Some(1),
                ..limits.clone()
            };
            let opts = SearchOptions {
                fuel: limits.fuel,
                seed: current.seed,
            };
            let found = PropertyRun::new(prog, fpc, spec, &cert, &opts, &first_limits)?.next().transpose()?;
            if let Some(mut next) = found {
                debug!("{}: shrank at height {h} ({rel})", spec.name);
                next.seed = current.seed;
                next.bound = current.bound;
                current = next;
                (items, height) = collect_items(prog, fpc, spec, &current, limits.fuel)?;
                adopted = true;
                break;
            }
        }
        if !adopted {
            return Ok(current);
        }
    }
}

/// Re-checks a counterexample from its printed bindings: the generator and
/// premise hold of them and the conclusion finitely fails.
pub fn replay(prog: &Program, spec: &PropertySpec, bindings: &[(String, String)], fuel: u64) -> Result<bool, HarnessError> {
    let opts = SearchOptions { fuel, seed: 0 };
    let mut search = Search::new(prog, None, &opts);
    let mut args = Vec::new();
    for v in &spec.vars {
        let arg = match bindings.iter().find(|(name, _)| name == v) {
            Some((_, src)) => {
                let (free, t) = parse_term(src, prog)?;
                let metas = search.fresh_vars(&free);
                crate::terms::instantiate_many(&t, &metas)
            }
            None => search.store.fresh_meta(0),
        };
        args.push(arg);
    }
    let mut premise = vec![spec.gen.instantiate(&args)];
    premise.extend(spec.when.as_ref().map(|w| w.instantiate(&args)));
    let then = spec.then.instantiate(&args);
    search.start(vec![Frame::prove(Goal::conj(premise), None)], ResourceContext::new());
    let fail = |source| HarnessError::Engine {
        prop: spec.name.clone(),
        source,
    };
    while search.next_solution().map_err(fail)? {
        match search.naf(&then, ResourceContext::new(), fuel) {
            Ok(true) => return Ok(true),
            Ok(false) => {}
            Err(e) => return Err(fail(e)),
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpclib::StdFpc;
    use crate::syntax::parse_program;

    const NATS: &str = "mode horn. ctor z 0. ctor s 1. ctor nil 0. ctor cons 2.\n\
        isnat z. isnat (s N) :- isnat N.\n\
        nlist nil. nlist (X :: L) :- isnat X, nlist L.\n\
        prop small := gen: isnat N. then: N = z.\n\
        prop fine := gen: isnat N. then: isnat N.";

    #[test]
    fn counterexamples_are_the_failing_cases() {
        let p = parse_program(NATS).unwrap();
        let spec = property(&p, "small").unwrap();
        let cexs = run_property(&p, &StdFpc, spec, "height 3", &SearchOptions::default(), &Limits::default()).unwrap();
        let shown: Vec<String> = cexs.iter().map(|c| c.get("N").unwrap().to_string()).collect();
        assert_eq!(shown, ["s z", "s (s z)"]);
        let spec = property(&p, "fine").unwrap();
        assert!(run_property(&p, &StdFpc, spec, "height 3", &SearchOptions::default(), &Limits::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn deepening_reports_each_counterexample_once() {
        let p = parse_program(NATS).unwrap();
        let spec = property(&p, "small").unwrap();
        let cexs: Vec<Counterexample> = Deepen::new(&p, &StdFpc, spec, (1, 4), None, &SearchOptions::default(), &Limits::default())
            .collect::<Result<_, _>>()
            .unwrap();
        let shown: Vec<(String, Option<u32>)> = cexs.iter().map(|c| (c.get("N").unwrap().to_string(), c.bound)).collect();
        assert_eq!(
            shown,
            [
                ("s z".to_string(), Some(2)),
                ("s (s z)".to_string(), Some(3)),
                ("s (s (s z))".to_string(), Some(4))
            ]
        );
    }

    #[test]
    fn zero_samples_is_an_empty_report() {
        let p = parse_program(NATS).unwrap();
        let spec = property(&p, "small").unwrap();
        let r = sample(&p, &StdFpc, spec, "noweight", 0, 1, &Limits::default()).unwrap();
        assert!(r.values.is_empty() && r.counterexamples.is_empty() && r.discards == 0);
    }

    #[test]
    fn tree_height_counts_decide_steps() {
        let p = parse_program(NATS).unwrap();
        let spec = property(&p, "small").unwrap();
        let cex = run_property(&p, &StdFpc, spec, "height 3 <c> max _", &SearchOptions::default(), &Limits::default())
            .unwrap()
            .remove(0);
        let tree = cex.cert.spine().1[1].spine().1[0].clone();
        assert_eq!(tree_height(&tree), 2);
    }

    #[test]
    fn replay_accepts_stored_bindings() {
        let p = parse_program(NATS).unwrap();
        let spec = property(&p, "small").unwrap();
        let ok = replay(&p, spec, &[("N".into(), "s z".into())], 1000).unwrap();
        assert!(ok);
        let ok = replay(&p, spec, &[("N".into(), "z".into())], 1000).unwrap();
        assert!(!ok);
    }

    #[test]
    fn minimal_counterexample_is_a_fixed_point() {
        let p = parse_program(NATS).unwrap();
        let spec = property(&p, "small").unwrap();
        let cex = run_property(&p, &StdFpc, spec, "height 2", &SearchOptions::default(), &Limits::default())
            .unwrap()
            .remove(0);
        let shrunk = shrink(&p, &StdFpc, spec, &cex, &Limits::default()).unwrap();
        assert_eq!(shrunk.bindings, cex.bindings);
    }
}
