//! Specification files, goals and certificates: parsing, elaboration against
//! declared constructors and predicates, Clark completion, and printing.

mod compile;
mod elab;
mod goal;
mod lexer;
mod parser;
pub mod print;

pub use compile::complete;
pub use elab::{parse_cert, parse_goal, parse_program, parse_program_as, parse_term, CERT_ARITIES};
pub use goal::{reindex_term, Goal};
pub use lexer::Pos;

use crate::terms::Term;
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {name} expects {expected} argument(s), got {found}")]
    Arity {
        line: usize,
        col: usize,
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: unknown constructor `{name}`")]
    UnknownCtor { line: usize, col: usize, name: String },
    #[error("{line}:{col}: unknown predicate `{name}`")]
    UnknownPredicate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: unknown certificate constructor `{name}`")]
    UnknownCert { line: usize, col: usize, name: String },
    #[error("duplicate weights declaration for `{0}`")]
    DuplicateWeights(String),
    #[error("weights for `{name}` list {found} entries but the predicate has {expected} disjunct(s)")]
    WeightsLength {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("{line}:{col}: {msg}")]
    Invalid { line: usize, col: usize, msg: String },
}

impl SyntaxError {
    pub(crate) fn invalid(pos: Pos, msg: impl Into<String>) -> Self {
        SyntaxError::Invalid {
            line: pos.line,
            col: pos.col,
            msg: msg.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Horn,
    #[default]
    Hh,
    Linear,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Horn => "horn",
            Mode::Hh => "hh",
            Mode::Linear => "linear",
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "horn" => Ok(Mode::Horn),
            "hh" => Ok(Mode::Hh),
            "linear" => Ok(Mode::Linear),
            other => Err(format!("unknown mode `{other}` (horn, hh or linear)")),
        }
    }
}

/// `head :- body` quantified over `vars`: both sit under `vars.len()`
/// binders, `vars[0]` outermost.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Clause {
    pub vars: Vec<String>,
    pub head: Term,
    pub body: Goal,
}

impl Clause {
    /// Argument terms of the head, under the clause binders.
    pub fn head_args(&self) -> Vec<Term> {
        self.head.spine().1.into_iter().cloned().collect()
    }
}

#[derive(Clone, Debug)]
pub struct PredDef {
    pub name: String,
    pub arity: usize,
    /// Surface clauses in textual order.
    pub clauses: Vec<Clause>,
    /// The single Clark-completed clause: head `p Y1 .. Yn`, body
    /// `D1 ; (D2 ; .. ; ff)`.
    pub completed: Clause,
    pub disjuncts: usize,
}

#[derive(Clone, Debug)]
pub struct PropertySpec {
    pub name: String,
    /// Free variables of the three goals, which sit under these binders.
    pub vars: Vec<String>,
    pub gen: Goal,
    pub when: Option<Goal>,
    pub then: Goal,
}

/// A goal with its free variables, existentially closed at query time.
#[derive(Clone, Debug)]
pub struct Query {
    pub vars: Vec<String>,
    pub goal: Goal,
}

#[derive(Clone, Debug, Default)]
pub struct Program {
    pub mode: Mode,
    pub ctors: BTreeMap<String, usize>,
    /// Every known predicate: clause heads, hypothesis antecedents, axioms.
    pub preds: BTreeMap<String, PredDef>,
    /// Atoms that succeed in any context, leaving it unchanged.
    pub axioms: BTreeMap<String, usize>,
    pub weights: BTreeMap<String, Vec<u32>>,
    pub props: Vec<PropertySpec>,
}

impl Program {
    pub fn prop(&self, name: &str) -> Option<&PropertySpec> {
        self.props.iter().find(|p| p.name == name)
    }

    pub fn is_predicate(&self, name: &str) -> bool {
        self.preds.contains_key(name)
    }
}

fn names_for(vars: &[String]) -> Vec<String> {
    vars.iter()
        .map(|v| if v.starts_with('$') { "_".to_string() } else { v.clone() })
        .collect()
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = names_for(&self.vars);
        print::write_term(f, &self.head, &names)?;
        if self.body != Goal::Tt {
            f.write_str(" :- ")?;
            print::write_goal(f, &self.body, &names)?;
        }
        f.write_str(".")
    }
}

impl fmt::Display for PropertySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = names_for(&self.vars);
        write!(f, "prop {} := gen: ", self.name)?;
        print::write_goal(f, &self.gen, &names)?;
        if let Some(w) = &self.when {
            f.write_str(". when: ")?;
            print::write_goal(f, w, &names)?;
        }
        f.write_str(". then: ")?;
        print::write_goal(f, &self.then, &names)?;
        f.write_str(".")
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        print::write_goal(f, &self.goal, &names_for(&self.vars))
    }
}

/// Surface source for the whole program; parsing it yields an equivalent
/// program.
impl fmt::Display for Program {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "mode {}.", self.mode.name())?;
        for (name, arity) in &self.ctors {
            writeln!(f, "ctor {name} {arity}.")?;
        }
        for (name, arity) in &self.axioms {
            writeln!(f, "axiom {name} {arity}.")?;
        }
        for def in self.preds.values() {
            for c in &def.clauses {
                writeln!(f, "{c}")?;
            }
        }
        for (name, ws) in &self.weights {
            let ws: Vec<String> = ws.iter().map(u32::to_string).collect();
            writeln!(f, "weights {name} [{}].", ws.join(", "))?;
        }
        for p in &self.props {
            writeln!(f, "{p}")?;
        }
        Ok(())
    }
}
