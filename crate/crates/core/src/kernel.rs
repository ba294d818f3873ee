//! The certificate-checking kernel: the interpreter of [`crate::engine`] with
//! every inference gated by an FPC (foundational proof certificate)
//! callback. Checking a permissive certificate is test-data generation.

use crate::engine::{EngineError, ResourceContext, Search, SearchOptions, Solutions};
use crate::fpclib::RandomSource;
use crate::syntax::{parse_cert, Program, Query, SyntaxError};
use crate::terms::{Store, Term};

/// Which side of a disjunction a certificate selects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Side {
    Left,
    Right,
}

/// One answer of a callback: equations to impose (checked by unification
/// when the alternative is tried) and the continuation data.
#[derive(Clone, Debug)]
pub struct Alt<T> {
    pub eqs: Vec<(Term, Term)>,
    pub out: T,
}

impl<T> Alt<T> {
    pub fn pass(out: T) -> Self {
        Alt { eqs: Vec::new(), out }
    }

    pub fn with(eqs: Vec<(Term, Term)>, out: T) -> Self {
        Alt { eqs, out }
    }
}

/// What a callback may use. Callbacks create fresh metavariables freely but
/// never bind them; bindings are requested through [`Alt::eqs`].
pub struct FpcCx<'a> {
    pub store: &'a mut Store,
    pub prog: &'a Program,
    pub rng: &'a mut RandomSource,
    /// Scope level for fresh metavariables at this point of the proof.
    pub level: u32,
}

impl FpcCx<'_> {
    pub fn fresh(&mut self) -> Term {
        self.store.fresh_meta(self.level)
    }
}

pub type Alts<T> = Result<Vec<Alt<T>>, EngineError>;

/// Experts and clerks interpreting a certificate at each kernel rule. An
/// empty result refuses the rule (finite failure).
pub trait Fpc {
    fn tt(&self, cx: &mut FpcCx, cert: &Term) -> Alts<()>;
    fn eq(&self, cx: &mut FpcCx, cert: &Term) -> Alts<()>;
    fn and(&self, cx: &mut FpcCx, cert: &Term) -> Alts<(Term, Term)>;
    fn or(&self, cx: &mut FpcCx, cert: &Term) -> Alts<(Term, Side)>;
    /// `witness` is the metavariable standing for the existential witness;
    /// it may already be bound when certificates are paired.
    fn some(&self, cx: &mut FpcCx, cert: &Term, witness: &Term) -> Alts<Term>;
    fn backchain(&self, cx: &mut FpcCx, cert: &Term, atom: &Term) -> Alts<Term>;
    fn init(&self, cx: &mut FpcCx, cert: &Term) -> Alts<()>;
    fn imp(&self, cx: &mut FpcCx, cert: &Term) -> Alts<Term>;
    /// `eigen` is the fresh eigenvariable; the continuation may mention it.
    fn all(&self, cx: &mut FpcCx, cert: &Term, eigen: &Term) -> Alts<Term>;
    fn limp(&self, cx: &mut FpcCx, cert: &Term) -> Alts<Term>;
    fn bang(&self, cx: &mut FpcCx, cert: &Term) -> Alts<Term>;
}

/// Accepts every rule once, passing the certificate through unchanged and
/// leaving witnesses unconstrained.
#[derive(Clone, Copy, Debug, Default)]
pub struct Permissive;

impl Fpc for Permissive {
    fn tt(&self, _: &mut FpcCx, _: &Term) -> Alts<()> {
        Ok(vec![Alt::pass(())])
    }
    fn eq(&self, _: &mut FpcCx, _: &Term) -> Alts<()> {
        Ok(vec![Alt::pass(())])
    }
    fn and(&self, _: &mut FpcCx, c: &Term) -> Alts<(Term, Term)> {
        Ok(vec![Alt::pass((c.clone(), c.clone()))])
    }
    fn or(&self, _: &mut FpcCx, c: &Term) -> Alts<(Term, Side)> {
        Ok(vec![Alt::pass((c.clone(), Side::Left)), Alt::pass((c.clone(), Side::Right))])
    }
    fn some(&self, _: &mut FpcCx, c: &Term, _: &Term) -> Alts<Term> {
        Ok(vec![Alt::pass(c.clone())])
    }
    fn backchain(&self, _: &mut FpcCx, c: &Term, _: &Term) -> Alts<Term> {
        Ok(vec![Alt::pass(c.clone())])
    }
    fn init(&self, _: &mut FpcCx, _: &Term) -> Alts<()> {
        Ok(vec![Alt::pass(())])
    }
    fn imp(&self, _: &mut FpcCx, c: &Term) -> Alts<Term> {
        Ok(vec![Alt::pass(c.clone())])
    }
    fn all(&self, _: &mut FpcCx, c: &Term, _: &Term) -> Alts<Term> {
        Ok(vec![Alt::pass(c.clone())])
    }
    fn limp(&self, _: &mut FpcCx, c: &Term) -> Alts<Term> {
        Ok(vec![Alt::pass(c.clone())])
    }
    fn bang(&self, _: &mut FpcCx, c: &Term) -> Alts<Term> {
        Ok(vec![Alt::pass(c.clone())])
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Enumerates the proofs of `query` (with intuitionistic `hyps`) that fit the
/// certificate `cert`, parsed in the search's own store.
pub fn check<'a>(
    fpc: &'a dyn Fpc,
    prog: &'a Program,
    cert: &str,
    hyps: &[Term],
    query: &Query,
    opts: &SearchOptions,
) -> Result<Solutions<'a>, CheckError> {
    ll_check(fpc, prog, cert, ResourceContext::unbounded(hyps), query, opts)
}

/// [`check`] in the linear I/O system, starting from `ctx`.
pub fn ll_check<'a>(
    fpc: &'a dyn Fpc,
    prog: &'a Program,
    cert: &str,
    ctx: ResourceContext,
    query: &Query,
    opts: &SearchOptions,
) -> Result<Solutions<'a>, CheckError> {
    let mut search = Search::new(prog, Some(fpc), opts);
    let cert = parse_cert(cert, prog, &mut search.store)?;
    Ok(Solutions::new(search, query, Some(cert), ctx))
}
