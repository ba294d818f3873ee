//! The bundled example programs and the outcomes they are known to produce.

use crate::engine::{solve, SearchOptions};
use crate::fpclib::StdFpc;
use crate::harness::{property, Counterexample, Deepen, HarnessError, Limits, PropertyRun};
use crate::syntax::{parse_goal, parse_program, parse_term, Mode, Program, SyntaxError};
use crate::terms::Term;
use thiserror::Error;

/// Variable bindings written in surface syntax.
pub type Bindings = &'static [(&'static str, &'static str)];

/// How a property is exercised.
#[derive(Clone, Copy, Debug)]
pub enum Run {
    Cert(&'static str),
    /// Iterative deepening over heights `lo..=hi`.
    Deepen(u32, u32),
}

/// Expected counterexamples, compared on the listed variables only, up to
/// α-equivalence.
#[derive(Clone, Copy, Debug)]
pub enum Expect {
    Nothing,
    /// Each listed case is among the counterexamples.
    Includes(&'static [Bindings]),
    /// The counterexamples are exactly the listed cases.
    Exactly(&'static [Bindings]),
    /// The first counterexample is the listed one.
    First(Bindings),
}

#[derive(Clone, Copy, Debug)]
pub enum Count {
    Exactly(usize),
    AtLeast(usize),
}

#[derive(Clone, Copy, Debug)]
pub enum Golden {
    Property {
        prop: &'static str,
        run: Run,
        /// Per-phase fuel, for premises with infinitely many solutions.
        fuel: Option<u64>,
        expect: Expect,
    },
    Query {
        goal: &'static str,
        count: Count,
    },
}

#[derive(Clone, Copy, Debug)]
pub struct CorpusEntry {
    pub file: &'static str,
    pub source: &'static str,
    pub mode: Mode,
    /// Each golden with a one-line account of what it demonstrates.
    pub goldens: &'static [(&'static str, Golden)],
}

impl CorpusEntry {
    pub fn load(&self) -> Result<Program, SyntaxError> {
        parse_program(self.source)
    }
}

const ETA_DIAMOND_TYPE: &str = "arrow (arrow unitTy unitTy) (arrow unitTy unitTy)";

const PRES2_TERMS: &[Bindings] = &[
    &[("M", r"app (lam x\ lam y\ y) (app (lam x\ x) (lam x\ x))")],
    &[("M", r"app (lam x\ lam y\ y) (lam x\ x)")],
    &[("M", r"app (lam x\ lam y\ y) (lam x\ lam y\ y)")],
    &[("M", r"app (lam x\ lam y\ y) (lam x\ lam y\ x)")],
];

const CBNV: Bindings = &[("M", r"app (lam w\ get) (set (- 1))"), ("V", "0"), ("U", "(- 1)")];

static ENTRIES: &[CorpusEntry] = &[
    CorpusEntry {
        file: "lists.sl",
        source: include_str!("../../../corpus/lists.sl"),
        mode: Mode::Horn,
        goldens: &[
            (
                "the accumulator reverse is not the identity",
                Golden::Property {
                    prop: "rev_id",
                    run: Run::Cert("height 3"),
                    fuel: None,
                    expect: Expect::Includes(&[&[("Xs", "s z :: z :: nil")]]),
                },
            ),
            (
                "naive reverse is symmetric",
                Golden::Property {
                    prop: "rev_sym",
                    run: Run::Cert("height 3"),
                    fuel: None,
                    expect: Expect::Nothing,
                },
            ),
            (
                "naive reverse is symmetric at every small height",
                Golden::Property {
                    prop: "rev_sym",
                    run: Run::Deepen(1, 5),
                    fuel: None,
                    expect: Expect::Nothing,
                },
            ),
        ],
    },
    CorpusEntry {
        file: "lambda.sl",
        source: include_str!("../../../corpus/lambda.sl"),
        mode: Mode::Hh,
        goldens: &[(
            "one-step beta reduction is not diamond",
            Golden::Property {
                prop: "beta_diamond",
                run: Run::Deepen(1, 6),
                fuel: None,
                expect: Expect::First(&[("M", r"app (lam x\ app x x) (app (lam x\ x) (lam x\ x))")]),
            },
        )],
    },
    CorpusEntry {
        file: "eta.sl",
        source: include_str!("../../../corpus/eta.sl"),
        mode: Mode::Hh,
        goldens: &[
            (
                "dropping the argument typing premise breaks preservation",
                Golden::Property {
                    prop: "eta_pres_bug",
                    run: Run::Cert("height 3"),
                    fuel: None,
                    expect: Expect::Includes(&[&[
                        ("A", "unitTy"),
                        ("N", r"app (lam x\ unit) (lam x\ x)"),
                        ("M", r"app (lam x\ x) (lam x\ x)"),
                    ]]),
                },
            ),
            (
                "type-directed eta reduction preserves types",
                Golden::Property {
                    prop: "eta_pres",
                    run: Run::Cert("height 3"),
                    fuel: None,
                    expect: Expect::Nothing,
                },
            ),
            (
                "type-directed eta reduction is not diamond",
                Golden::Property {
                    prop: "eta_diamond",
                    run: Run::Deepen(1, 4),
                    fuel: None,
                    expect: Expect::First(&[
                        ("A", ETA_DIAMOND_TYPE),
                        ("M", r"lam x\ lam y\ app x y"),
                        ("M1", r"lam x\ x"),
                        ("M2", r"lam x\ lam y\ unit"),
                    ]),
                },
            ),
            (
                "the eta reduct",
                Golden::Query {
                    goal: r"teta (lam x\ lam y\ app x y) (lam x\ x) (arrow (arrow unitTy unitTy) (arrow unitTy unitTy))",
                    count: Count::AtLeast(1),
                },
            ),
            (
                "the unit reduct",
                Golden::Query {
                    goal: r"teta (lam x\ lam y\ app x y) (lam x\ lam y\ unit) (arrow (arrow unitTy unitTy) (arrow unitTy unitTy))",
                    count: Count::AtLeast(1),
                },
            ),
        ],
    },
    CorpusEntry {
        file: "perm.sl",
        source: include_str!("../../../corpus/perm.sl"),
        mode: Mode::Linear,
        goldens: &[
            (
                "three elements have six permutations",
                Golden::Query {
                    goal: "perm (1 :: 2 :: 3 :: nil) K",
                    count: Count::Exactly(6),
                },
            ),
            (
                "a reusable element resource lets elements vanish",
                Golden::Property {
                    prop: "perm_pres_bug",
                    run: Run::Cert("height 2"),
                    fuel: Some(2_000),
                    expect: Expect::Includes(&[&[("L", "z :: nil"), ("K", "nil")]]),
                },
            ),
            (
                "permutation preserves membership",
                Golden::Property {
                    prop: "perm_pres",
                    run: Run::Cert("height 2"),
                    fuel: Some(2_000),
                    expect: Expect::Nothing,
                },
            ),
        ],
    },
    CorpusEntry {
        file: "counter.sl",
        source: include_str!("../../../corpus/counter.sl"),
        mode: Mode::Linear,
        goldens: &[
            (
                "call-by-name and call-by-value disagree on an effectful argument",
                Golden::Property {
                    prop: "cbnv",
                    run: Run::Cert("height 3"),
                    fuel: None,
                    expect: Expect::Includes(&[CBNV]),
                },
            ),
            (
                "the smallest disagreement",
                Golden::Property {
                    prop: "cbnv",
                    run: Run::Deepen(1, 3),
                    fuel: None,
                    expect: Expect::First(CBNV),
                },
            ),
        ],
    },
    CorpusEntry {
        file: "linear_terms.sl",
        source: include_str!("../../../corpus/linear_terms.sl"),
        mode: Mode::Linear,
        goldens: &[
            (
                "call-by-name preserves linearity",
                Golden::Property {
                    prop: "pres1_cbn",
                    run: Run::Cert("height 4"),
                    fuel: None,
                    expect: Expect::Nothing,
                },
            ),
            (
                "call-by-value preserves linearity",
                Golden::Property {
                    prop: "pres1_cbv",
                    run: Run::Cert("height 4"),
                    fuel: None,
                    expect: Expect::Nothing,
                },
            ),
            (
                "non-linear terms with linear call-by-name values",
                Golden::Property {
                    prop: "pres2_cbn",
                    run: Run::Cert("height 4"),
                    fuel: None,
                    expect: Expect::Exactly(PRES2_TERMS),
                },
            ),
            (
                "non-linear terms with linear call-by-value values",
                Golden::Property {
                    prop: "pres2_cbv",
                    run: Run::Cert("height 4"),
                    fuel: None,
                    expect: Expect::Exactly(PRES2_TERMS),
                },
            ),
        ],
    },
];

pub fn corpus_specs() -> &'static [CorpusEntry] {
    ENTRIES
}

pub fn entry(file: &str) -> Option<&'static CorpusEntry> {
    ENTRIES.iter().find(|e| e.file == file)
}

#[derive(Debug, Error)]
pub enum GoldenError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Run(#[from] HarnessError),
    #[error("search failed: {0}")]
    Engine(#[from] crate::engine::EngineError),
    #[error("{0}")]
    Mismatch(String),
}

/// Parses expected bindings; the terms must be closed.
pub fn expected_terms(prog: &Program, bindings: Bindings) -> Result<Vec<(String, Term)>, SyntaxError> {
    bindings
        .iter()
        .map(|(var, src)| {
            let (free, t) = parse_term(src, prog)?;
            debug_assert!(free.is_empty(), "expected term {src} has free variables");
            Ok((var.to_string(), t))
        })
        .collect()
}

/// True iff `cex` binds every expected variable to an α-equivalent term.
pub fn matches(cex: &Counterexample, expected: &[(String, Term)]) -> bool {
    expected.iter().all(|(v, t)| cex.get(v) == Some(t))
}

fn show(cexs: &[Counterexample]) -> String {
    let shown: Vec<String> = cexs
        .iter()
        .map(|c| {
            let bs: Vec<String> = c.bindings.iter().map(|(v, t)| format!("{v} = {t}")).collect();
            format!("{{{}}}", bs.join(", "))
        })
        .collect();
    format!("[{}]", shown.join("; "))
}

/// Runs a property golden, returning its counterexamples.
pub fn run_golden(prog: &Program, prop: &str, run: Run, fuel: Option<u64>, first_only: bool) -> Result<Vec<Counterexample>, HarnessError> {
    let spec = property(prog, prop)?;
    let limits = Limits {
        fuel: fuel.unwrap_or(Limits::default().fuel),
        max_counterexamples: first_only.then_some(1),
        max_cases: None,
    };
    let opts = SearchOptions {
        fuel: limits.fuel,
        seed: 0,
    };
    match run {
        Run::Cert(cert) => PropertyRun::new(prog, &StdFpc, spec, cert, &opts, &limits)?.collect(),
        Run::Deepen(lo, hi) => Deepen::new(prog, &StdFpc, spec, (lo, hi), None, &opts, &limits).collect(),
    }
}

/// Checks one golden against `prog`.
pub fn verify(prog: &Program, golden: &Golden) -> Result<(), GoldenError> {
    match *golden {
        Golden::Query { goal, count } => {
            let query = parse_goal(goal, prog)?;
            let n = solve(prog, &[], &query, &SearchOptions::default())
                .collect::<Result<Vec<_>, _>>()?
                .len();
            let ok = match count {
                Count::Exactly(k) => n == k,
                Count::AtLeast(k) => n >= k,
            };
            if ok {
                Ok(())
            } else {
                Err(GoldenError::Mismatch(format!("{goal}: {n} solutions, expected {count:?}")))
            }
        }
        Golden::Property { prop, run, fuel, expect } => {
            let first_only = matches!(expect, Expect::First(_));
            let cexs = run_golden(prog, prop, run, fuel, first_only)?;
            let mismatch = |what: &str| Err(GoldenError::Mismatch(format!("{prop}: {what}, got {}", show(&cexs))));
            match expect {
                Expect::Nothing if cexs.is_empty() => Ok(()),
                Expect::Nothing => mismatch("expected no counterexample"),
                Expect::First(bindings) => {
                    let want = expected_terms(prog, bindings)?;
                    match cexs.first() {
                        Some(c) if matches(c, &want) => Ok(()),
                        _ => mismatch("unexpected first counterexample"),
                    }
                }
                Expect::Includes(cases) => {
                    for case in cases {
                        let want = expected_terms(prog, case)?;
                        if !cexs.iter().any(|c| matches(c, &want)) {
                            return mismatch("missing an expected counterexample");
                        }
                    }
                    Ok(())
                }
                Expect::Exactly(cases) => {
                    let wants = cases
                        .iter()
                        .map(|case| expected_terms(prog, case))
                        .collect::<Result<Vec<_>, _>>()?;
                    let all_expected = cexs.iter().all(|c| wants.iter().any(|w| matches(c, w)));
                    let all_found = wants.iter().all(|w| cexs.iter().any(|c| matches(c, w)));
                    if all_expected && all_found && cexs.len() == wants.len() {
                        Ok(())
                    } else {
                        mismatch("counterexample set differs")
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_entry_parses_in_its_mode() {
        for e in corpus_specs() {
            let prog = e.load().unwrap_or_else(|err| panic!("{}: {err}", e.file));
            assert_eq!(prog.mode, e.mode, "{}", e.file);
            for (what, g) in e.goldens {
                if let Golden::Property { prop, .. } = g {
                    assert!(prog.prop(prop).is_some(), "{}: {what}: no property {prop}", e.file);
                }
            }
        }
    }

    #[test]
    fn expected_terms_are_closed() {
        for e in corpus_specs() {
            let prog = e.load().unwrap();
            for (_, g) in e.goldens {
                let cases: Vec<Bindings> = match g {
                    Golden::Property { expect: Expect::Includes(cs) | Expect::Exactly(cs), .. } => cs.to_vec(),
                    Golden::Property { expect: Expect::First(b), .. } => vec![*b],
                    _ => vec![],
                };
                for case in cases {
                    for (_, src) in case {
                        let (free, _) = parse_term(src, &prog).unwrap();
                        assert!(free.is_empty(), "{src}");
                    }
                }
            }
        }
    }
}
