//! The `pbt` command line: solve and check queries, test properties, sample
//! generators. Reports are text or JSON; the JSON layout is documented in
//! the repository README.

use crate::engine::{solve, EngineError, SearchOptions, Solution, DEFAULT_FUEL};
use crate::fpclib::StdFpc;
use crate::harness::{self, Counterexample, Deepen, HarnessError, Limits, PropertyRun};
use crate::kernel::{check, CheckError};
use crate::syntax::{parse_goal, parse_program_as, Goal, Mode, Program, PropertySpec, SyntaxError};
use crate::terms::Term;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;
use thiserror::Error;

pub const TOOL: &str = "pbt";

/// Exit statuses.
pub mod exit {
    pub const OK: i32 = 0;
    pub const COUNTEREXAMPLES: i32 = 1;
    pub const USAGE: i32 = 2;
    pub const RUNTIME: i32 = 3;
}

#[derive(Debug, Parser)]
#[command(name = "pbt", version, about = "Property-based testing of logic specifications")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Horn,
    Hh,
    Linear,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Horn => Mode::Horn,
            ModeArg::Hh => Mode::Hh,
            ModeArg::Linear => Mode::Linear,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct Common {
    /// Program file; repeat to concatenate several.
    #[arg(long = "program", required = true)]
    pub programs: Vec<PathBuf>,
    /// Overrides the `mode` declaration of the program.
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Step budget of each search phase.
    #[arg(long, env = "PBT_FUEL", default_value_t = DEFAULT_FUEL,
          value_parser = clap::value_parser!(u64).range(1..))]
    pub fuel: u64,
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text)]
    pub format: Format,
}

/// An inclusive range of heights written `lo..hi`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct HeightRange {
    pub lo: u32,
    pub hi: u32,
}

fn parse_range(s: &str) -> Result<HeightRange, String> {
    let (lo, hi) = s.split_once("..").ok_or("expected lo..hi")?;
    let lo: u32 = lo.trim().parse().map_err(|e| format!("bad lower bound: {e}"))?;
    let hi: u32 = hi.trim().parse().map_err(|e| format!("bad upper bound: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok(HeightRange { lo, hi })
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    /// Enumerates solutions of a goal by unrestricted proof search.
    Solve {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// Query; its capitalized free variables are reported.
        #[arg(long)]
        goal: String,
        /// Report every solution.
        #[arg(long)]
        all: bool,
        /// Stop after this many solutions (default 1).
        #[arg(long, conflicts_with = "all")]
        max_solutions: Option<usize>,
    },
    /// Enumerates the solutions of a goal whose proofs fit a certificate.
    Check {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// Query; its capitalized free variables are reported.
        #[arg(long)]
        goal: String,
        /// Certificate, e.g. `height 3` or `sze 5 _ <c> max _`.
        #[arg(long)]
        cert: String,
        /// Report every solution.
        #[arg(long)]
        all: bool,
        /// Stop after this many solutions (default 1).
        #[arg(long, conflicts_with = "all")]
        max_solutions: Option<usize>,
    },
    /// Searches for counterexamples to properties.
    Prop {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// Property to test; repeat for several. Defaults to every property.
        #[arg(long = "prop")]
        props: Vec<String>,
        /// Generation certificate.
        #[arg(long, conflicts_with = "deepen", required_unless_present_any = ["deepen", "replay"])]
        cert: Option<String>,
        /// Iterative deepening over heights `lo..hi`.
        #[arg(long, value_parser = parse_range)]
        deepen: Option<HeightRange>,
        /// With --deepen, also bound proof size by this multiple of the height.
        #[arg(long, requires = "deepen")]
        size_factor: Option<u32>,
        /// Seed of the random source used by random certificates.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Stop each property after this many counterexamples.
        #[arg(long)]
        max_counterexamples: Option<usize>,
        /// Shrink every counterexample (horn programs).
        #[arg(long)]
        shrink: bool,
        /// Re-checks the counterexamples stored in a JSON report instead of
        /// searching.
        #[arg(long, conflicts_with_all = ["cert", "deepen", "shrink"])]
        replay: Option<PathBuf>,
    },
    /// Draws random test cases from a generator.
    Sample {
        #[command(flatten)]
        #[serde(flatten)]
        common: Common,
        /// Property whose generator is sampled; each case is also tested.
        #[arg(long, required_unless_present = "goal", conflicts_with = "goal")]
        prop: Option<String>,
        /// Samples the solutions of a goal instead of testing a property.
        #[arg(long)]
        goal: Option<String>,
        /// Number of draws.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Seed; draw `i` uses stream `i` of this seed.
        #[arg(long)]
        seed: u64,
        /// Certificate guiding each draw.
        #[arg(long, default_value = "noweight")]
        cert: String,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Solve { common, .. }
            | Command::Check { common, .. }
            | Command::Prop { common, .. }
            | Command::Sample { common, .. } => common,
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error(transparent)]
    Harness(#[from] HarnessError),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Usage(_) | CliError::Syntax(_) => exit::USAGE,
            CliError::Harness(HarnessError::Syntax(_) | HarnessError::UnknownProperty(_)) => exit::USAGE,
            CliError::Engine(_) | CliError::Harness(_) => exit::RUNTIME,
        }
    }
}

impl From<CheckError> for CliError {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::Syntax(e) => CliError::Syntax(e),
            CheckError::Engine(e) => CliError::Engine(e),
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub tool: &'static str,
    pub version: &'static str,
    pub config: Command,
    #[serde(flatten)]
    pub body: Body,
}

#[derive(Debug, Serialize)]
#[serde(untagged)]
pub enum Body {
    Solutions {
        solutions: Vec<SolutionReport>,
        timings: Timings,
    },
    Properties {
        properties: Vec<PropertyReport>,
    },
    Samples {
        samples: Vec<SampleReport>,
    },
    Replays {
        replays: Vec<ReplayReport>,
    },
}

#[derive(Debug, Serialize)]
pub struct Timings {
    pub elapsed_ms: f64,
}

impl Timings {
    fn since(start: Instant) -> Self {
        Timings {
            elapsed_ms: start.elapsed().as_secs_f64() * 1000.0,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct SolutionReport {
    pub bindings: Map<String, Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cert: Option<String>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct CounterexampleReport {
    pub bindings: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cert: Option<String>,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bound: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shrunk: Option<Map<String, Value>>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct PropertyReport {
    pub name: String,
    /// The certificate, or `deepen lo..hi`.
    pub bound: String,
    pub seed: u64,
    pub generated: usize,
    pub discards: usize,
    pub counterexamples: Vec<CounterexampleReport>,
    #[serde(skip_deserializing)]
    pub timings: Option<Timings>,
}

#[derive(Debug, Serialize)]
pub struct SampleReport {
    pub name: String,
    pub seed: u64,
    pub count: usize,
    pub values: Vec<Map<String, Value>>,
    pub counterexamples: Vec<CounterexampleReport>,
    pub discards: usize,
    pub timings: Timings,
}

#[derive(Debug, Serialize)]
pub struct ReplayReport {
    pub name: String,
    pub bindings: Map<String, Value>,
    /// The stored bindings still refute the property.
    pub reproduced: bool,
}

fn bindings_map(bindings: &[(String, Term)]) -> Map<String, Value> {
    bindings
        .iter()
        .map(|(v, t)| (v.clone(), Value::String(t.to_string())))
        .collect()
}

fn load_program(common: &Common) -> Result<Program, CliError> {
    let mut src = String::new();
    for path in &common.programs {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        src.push_str(&text);
        src.push('\n');
    }
    Ok(parse_program_as(&src, common.mode.map(Mode::from))?)
}

fn solution_limit(all: bool, max: Option<usize>) -> Option<usize> {
    if all {
        None
    } else {
        Some(max.unwrap_or(1))
    }
}

fn solution_reports(
    solutions: impl Iterator<Item = Result<Solution, EngineError>>,
    limit: Option<usize>,
) -> Result<Vec<SolutionReport>, CliError> {
    let mut out = Vec::new();
    for s in solutions.take(limit.unwrap_or(usize::MAX)) {
        let s = s?;
        out.push(SolutionReport {
            bindings: bindings_map(&s.bindings),
            cert: s.cert.as_ref().map(Term::to_string),
        });
    }
    Ok(out)
}

fn cex_report(cex: &Counterexample, show_cert: bool, shrunk: Option<&Counterexample>) -> CounterexampleReport {
    CounterexampleReport {
        bindings: bindings_map(&cex.bindings),
        cert: show_cert.then(|| cex.cert.to_string()),
        seed: cex.seed,
        bound: cex.bound,
        shrunk: shrunk.map(|s| bindings_map(&s.bindings)),
    }
}

/// Runs a parsed command. The exit status accompanies the report.
pub fn execute(command: Command) -> Result<(Report, i32), CliError> {
    let prog = load_program(command.common())?;
    let fuel = command.common().fuel;
    let (body, status) = match &command {
        Command::Solve { goal, all, max_solutions, .. } => {
            let start = Instant::now();
            let query = parse_goal(goal, &prog)?;
            let opts = SearchOptions { fuel, seed: 0 };
            let solutions = solution_reports(solve(&prog, &[], &query, &opts), solution_limit(*all, *max_solutions))?;
            (
                Body::Solutions {
                    solutions,
                    timings: Timings::since(start),
                },
                exit::OK,
            )
        }
        Command::Check {
            goal,
            cert,
            all,
            max_solutions,
            ..
        } => {
            let start = Instant::now();
            let query = parse_goal(goal, &prog)?;
            let opts = SearchOptions { fuel, seed: 0 };
            let solutions = check(&StdFpc, &prog, cert, &[], &query, &opts)?;
            let solutions = solution_reports(solutions, solution_limit(*all, *max_solutions))?;
            (
                Body::Solutions {
                    solutions,
                    timings: Timings::since(start),
                },
                exit::OK,
            )
        }
        Command::Prop {
            props,
            replay: Some(path),
            ..
        } => {
            let replays = replay_report(&prog, path, props, fuel)?;
            let status = if replays.iter().any(|r| r.reproduced) {
                exit::COUNTEREXAMPLES
            } else {
                exit::OK
            };
            (Body::Replays { replays }, status)
        }
        Command::Prop {
            props,
            cert,
            deepen,
            size_factor,
            seed,
            max_counterexamples,
            shrink,
            ..
        } => {
            let names: Vec<String> = if props.is_empty() {
                prog.props.iter().map(|p| p.name.clone()).collect()
            } else {
                props.clone()
            };
            let limits = Limits {
                fuel,
                max_counterexamples: *max_counterexamples,
                max_cases: None,
            };
            let opts = SearchOptions { fuel, seed: *seed };
            let mut reports = Vec::new();
            for name in &names {
                let spec = harness::property(&prog, name)?;
                let start = Instant::now();
                let (cexs, generated, discards, bound, show_cert) = match (cert, deepen) {
                    (Some(cert), _) => {
                        let mut run = PropertyRun::new(&prog, &StdFpc, spec, cert, &opts, &limits)?;
                        let cexs = run.by_ref().collect::<Result<Vec<_>, _>>()?;
                        (cexs, run.generated, run.discards, cert.clone(), cert.contains("max"))
                    }
                    (None, Some(range)) => {
                        let mut run = Deepen::new(&prog, &StdFpc, spec, (range.lo, range.hi), *size_factor, &opts, &limits);
                        let cexs = run.by_ref().collect::<Result<Vec<_>, _>>()?;
                        let bound = format!("deepen {}..{}", range.lo, range.hi);
                        (cexs, run.generated, run.discards, bound, false)
                    }
                    (None, None) => return Err(CliError::Usage("one of --cert, --deepen or --replay is required".into())),
                };
                let mut counterexamples = Vec::new();
                for cex in &cexs {
                    let shrunk = if *shrink {
                        Some(harness::shrink(&prog, &StdFpc, spec, cex, &limits)?)
                    } else {
                        None
                    };
                    counterexamples.push(cex_report(cex, show_cert, shrunk.as_ref()));
                }
                reports.push(PropertyReport {
                    name: name.clone(),
                    bound,
                    seed: *seed,
                    generated,
                    discards,
                    counterexamples,
                    timings: Some(Timings::since(start)),
                });
            }
            let status = if reports.iter().any(|r| !r.counterexamples.is_empty()) {
                exit::COUNTEREXAMPLES
            } else {
                exit::OK
            };
            (Body::Properties { properties: reports }, status)
        }
        Command::Sample {
            prop,
            goal,
            count,
            seed,
            cert,
            ..
        } => {
            let start = Instant::now();
            let goal_spec;
            let spec = match (prop, goal) {
                (Some(name), _) => harness::property(&prog, name)?,
                (None, Some(goal)) => {
                    let query = parse_goal(goal, &prog)?;
                    goal_spec = PropertySpec {
                        name: "goal".into(),
                        vars: query.vars,
                        gen: query.goal,
                        when: None,
                        then: Goal::Tt,
                    };
                    &goal_spec
                }
                (None, None) => return Err(CliError::Usage("one of --prop or --goal is required".into())),
            };
            let limits = Limits {
                fuel,
                ..Limits::default()
            };
            let r = harness::sample(&prog, &StdFpc, spec, cert, *count, *seed, &limits)?;
            let report = SampleReport {
                name: spec.name.clone(),
                seed: *seed,
                count: *count,
                values: r.values.iter().map(|v| bindings_map(v)).collect(),
                counterexamples: r.counterexamples.iter().map(|c| cex_report(c, false, None)).collect(),
                discards: r.discards,
                timings: Timings::since(start),
            };
            let status = if report.counterexamples.is_empty() {
                exit::OK
            } else {
                exit::COUNTEREXAMPLES
            };
            (Body::Samples { samples: vec![report] }, status)
        }
    };
    Ok((
        Report {
            tool: TOOL,
            version: env!("CARGO_PKG_VERSION"),
            config: command,
            body,
        },
        status,
    ))
}

#[derive(Deserialize)]
struct StoredReport {
    properties: Vec<PropertyReport>,
}

fn replay_report(prog: &Program, path: &PathBuf, only: &[String], fuel: u64) -> Result<Vec<ReplayReport>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.clone(),
        source,
    })?;
    let stored: StoredReport =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: not a property report: {e}", path.display())))?;
    let mut out = Vec::new();
    for prop in stored.properties {
        if !only.is_empty() && !only.contains(&prop.name) {
            continue;
        }
        let spec = harness::property(prog, &prop.name)?;
        for cex in prop.counterexamples {
            let bindings = cex
                .bindings
                .iter()
                .map(|(v, t)| match t {
                    Value::String(s) => Ok((v.clone(), s.clone())),
                    other => Err(CliError::Usage(format!("binding {v} is not a string: {other}"))),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let reproduced = harness::replay(prog, spec, &bindings, fuel)?;
            out.push(ReplayReport {
                name: prop.name.clone(),
                bindings: cex.bindings,
                reproduced,
            });
        }
    }
    Ok(out)
}

fn write_bindings(out: &mut dyn Write, indent: &str, bindings: &Map<String, Value>) -> std::io::Result<()> {
    if bindings.is_empty() {
        return writeln!(out, "{indent}yes");
    }
    let shown: Vec<String> = bindings
        .iter()
        .map(|(v, t)| format!("{v} = {}", t.as_str().unwrap_or_default()))
        .collect();
    writeln!(out, "{indent}{}", shown.join(", "))
}

pub fn write_text(out: &mut dyn Write, report: &Report) -> std::io::Result<()> {
    match &report.body {
        Body::Solutions { solutions, .. } => {
            if solutions.is_empty() {
                writeln!(out, "no")?;
            }
            for s in solutions {
                write_bindings(out, "", &s.bindings)?;
                if let Some(cert) = &s.cert {
                    writeln!(out, "  cert: {cert}")?;
                }
            }
        }
        Body::Properties { properties } => {
            for p in properties {
                writeln!(
                    out,
                    "{} ({}): {} counterexample(s), {} case(s) generated, {} discarded",
                    p.name,
                    p.bound,
                    p.counterexamples.len(),
                    p.generated,
                    p.discards
                )?;
                for c in &p.counterexamples {
                    write_bindings(out, "  ", &c.bindings)?;
                    if let Some(h) = c.bound {
                        writeln!(out, "    found at height {h}")?;
                    }
                    if let Some(cert) = &c.cert {
                        writeln!(out, "    cert: {cert}")?;
                    }
                    if let Some(s) = &c.shrunk {
                        write_bindings(out, "    shrunk: ", s)?;
                    }
                }
            }
        }
        Body::Samples { samples } => {
            for s in samples {
                writeln!(
                    out,
                    "{} (seed {}): {} value(s), {} counterexample(s), {} discarded",
                    s.name,
                    s.seed,
                    s.values.len(),
                    s.counterexamples.len(),
                    s.discards
                )?;
                for v in &s.values {
                    write_bindings(out, "  ", v)?;
                }
                for c in &s.counterexamples {
                    write_bindings(out, "  counterexample: ", &c.bindings)?;
                }
            }
        }
        Body::Replays { replays } => {
            for r in replays {
                let verdict = if r.reproduced { "reproduced" } else { "not reproduced" };
                write_bindings(out, &format!("{} {verdict}: ", r.name), &r.bindings)?;
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and prints its
/// report. Returns the exit status.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let status = if e.use_stderr() { exit::USAGE } else { exit::OK };
            let _ = if e.use_stderr() {
                write!(err, "{e}")
            } else {
                write!(out, "{e}")
            };
            return status;
        }
    };
    let format = cli.command.common().format;
    match execute(cli.command) {
        Ok((report, status)) => {
            let written = match format {
                Format::Json => serde_json::to_writer_pretty(&mut *out, &report)
                    .map_err(std::io::Error::from)
                    .and_then(|_| writeln!(out)),
                Format::Text => write_text(out, &report),
            };
            match written {
                Ok(()) => status,
                Err(e) => {
                    let _ = writeln!(err, "pbt: {e}");
                    exit::RUNTIME
                }
            }
        }
        Err(e) => {
            let _ = writeln!(err, "pbt: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_parse() {
        let r = parse_range("1..5").unwrap();
        assert_eq!((r.lo, r.hi), (1, 5));
        assert!(parse_range("5..1").is_err());
        assert!(parse_range("3").is_err());
    }

    #[test]
    fn missing_program_is_a_usage_error() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let status = run(["pbt", "solve", "--goal", "tt"], &mut out, &mut err);
        assert_eq!(status, exit::USAGE);
        let status = run(
            ["pbt", "solve", "--program", "/nonexistent.sl", "--goal", "tt"],
            &mut out,
            &mut err,
        );
        assert_eq!(status, exit::USAGE);
    }

    #[test]
    fn zero_fuel_is_rejected() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let status = run(
            ["pbt", "solve", "--program", "x.sl", "--goal", "tt", "--fuel", "0"],
            &mut out,
            &mut err,
        );
        assert_eq!(status, exit::USAGE);
    }
}
