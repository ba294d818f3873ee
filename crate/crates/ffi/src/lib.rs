//! C ABI over `pbt_core`. Programs are opaque handles; results come back as
//! JSON strings owned by the caller and released with `pbt_string_free`.
//! On failure a function returns a non-zero status and `pbt_last_error`
//! describes it.

use pbt_core::engine::{solve, EngineError, SearchOptions, Solution};
use pbt_core::fpclib::StdFpc;
use pbt_core::harness::{self, HarnessError, Limits};
use pbt_core::kernel::{check, CheckError};
use pbt_core::syntax::{parse_goal, parse_program, Program, SyntaxError};
use serde_json::{json, Map, Value};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbtStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    UnknownProperty = 4,
    /// Fuel exhaustion, non-pattern unification, non-ground negation and
    /// other search failures.
    Runtime = 5,
    Panic = 6,
}

/// A parsed program.
pub struct PbtProgram {
    program: Program,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let msg = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

struct Failure(PbtStatus, String);

impl From<SyntaxError> for Failure {
    fn from(e: SyntaxError) -> Self {
        Failure(PbtStatus::Syntax, e.to_string())
    }
}

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        Failure(PbtStatus::Runtime, e.to_string())
    }
}

impl From<CheckError> for Failure {
    fn from(e: CheckError) -> Self {
        match e {
            CheckError::Syntax(e) => e.into(),
            CheckError::Engine(e) => e.into(),
        }
    }
}

impl From<HarnessError> for Failure {
    fn from(e: HarnessError) -> Self {
        let status = match &e {
            HarnessError::Syntax(_) => PbtStatus::Syntax,
            HarnessError::UnknownProperty(_) => PbtStatus::UnknownProperty,
            _ => PbtStatus::Runtime,
        };
        Failure(status, e.to_string())
    }
}

/// Runs `body`, translating failures and panics into a status.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> PbtStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => PbtStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            PbtStatus::Panic
        }
    }
}

/// # Safety
/// `s` is null or a NUL-terminated string valid for the call.
unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(PbtStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(PbtStatus::InvalidUtf8, format!("{what}: {e}")))
}

/// # Safety
/// `out` is null or valid for a pointer write.
unsafe fn write_json(out: *mut *mut c_char, value: &Value) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(PbtStatus::NullArgument, "output pointer is null".into()));
    }
    let text = CString::new(value.to_string()).expect("JSON has no NUL");
    *out = text.into_raw();
    Ok(())
}

fn handle<'a>(p: *const PbtProgram) -> Result<&'a Program, Failure> {
    // SAFETY: non-null handles come from `pbt_program_parse`.
    unsafe { p.as_ref() }
        .map(|p| &p.program)
        .ok_or_else(|| Failure(PbtStatus::NullArgument, "program is null".into()))
}

fn options(fuel: u64) -> SearchOptions {
    let mut opts = SearchOptions::default();
    if fuel > 0 {
        opts.fuel = fuel;
    }
    opts
}

fn solutions_json(
    sols: impl Iterator<Item = Result<Solution, EngineError>>,
    max_solutions: usize,
) -> Result<Value, Failure> {
    let limit = if max_solutions == 0 { usize::MAX } else { max_solutions };
    let mut out = Vec::new();
    for s in sols.take(limit) {
        let s = s?;
        let bindings: Map<String, Value> = s.bindings.iter().map(|(v, t)| (v.clone(), Value::String(t.to_string()))).collect();
        let mut entry = json!({ "bindings": bindings });
        if let Some(cert) = &s.cert {
            entry["cert"] = Value::String(cert.to_string());
        }
        out.push(entry);
    }
    Ok(Value::Array(out))
}

/// The message of the last failure on this thread, or null. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn pbt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Parses program text into a new handle stored in `*out`.
///
/// # Safety
/// `source` is a NUL-terminated string; `out` is valid for a pointer write.
#[no_mangle]
pub unsafe extern "C" fn pbt_program_parse(source: *const c_char, out: *mut *mut PbtProgram) -> PbtStatus {
    guard(|| {
        let src = read_str(source, "source")?;
        if out.is_null() {
            return Err(Failure(PbtStatus::NullArgument, "output pointer is null".into()));
        }
        let program = parse_program(src)?;
        *out = Box::into_raw(Box::new(PbtProgram { program }));
        Ok(())
    })
}

/// Releases a program handle. Null is ignored.
///
/// # Safety
/// `program` is null or a handle from `pbt_program_parse` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pbt_program_free(program: *mut PbtProgram) {
    if !program.is_null() {
        drop(Box::from_raw(program));
    }
}

/// Solves `goal`, writing a JSON array of `{"bindings": {..}}` objects.
/// `max_solutions == 0` asks for all; `fuel == 0` uses the default budget.
///
/// # Safety
/// Pointers are valid as for `pbt_program_parse`.
#[no_mangle]
pub unsafe extern "C" fn pbt_solve(
    program: *const PbtProgram,
    goal: *const c_char,
    max_solutions: usize,
    fuel: u64,
    out_json: *mut *mut c_char,
) -> PbtStatus {
    guard(|| {
        let prog = handle(program)?;
        let query = parse_goal(read_str(goal, "goal")?, prog)?;
        let value = solutions_json(solve(prog, &[], &query, &options(fuel)), max_solutions)?;
        write_json(out_json, &value)
    })
}

/// As `pbt_solve`, restricted to proofs that fit `cert`; each solution also
/// carries the resolved certificate.
///
/// # Safety
/// Pointers are valid as for `pbt_program_parse`.
#[no_mangle]
pub unsafe extern "C" fn pbt_check(
    program: *const PbtProgram,
    goal: *const c_char,
    cert: *const c_char,
    max_solutions: usize,
    fuel: u64,
    out_json: *mut *mut c_char,
) -> PbtStatus {
    guard(|| {
        let prog = handle(program)?;
        let query = parse_goal(read_str(goal, "goal")?, prog)?;
        let cert = read_str(cert, "cert")?;
        let sols = check(&StdFpc, prog, cert, &[], &query, &options(fuel))?;
        let value = solutions_json(sols, max_solutions)?;
        write_json(out_json, &value)
    })
}

/// Tests a property under `cert`, writing a JSON array of counterexamples
/// `{"bindings": {..}, "cert": ".."}`.
///
/// # Safety
/// Pointers are valid as for `pbt_program_parse`.
#[no_mangle]
pub unsafe extern "C" fn pbt_run_property(
    program: *const PbtProgram,
    property: *const c_char,
    cert: *const c_char,
    fuel: u64,
    out_json: *mut *mut c_char,
) -> PbtStatus {
    guard(|| {
        let prog = handle(program)?;
        let spec = harness::property(prog, read_str(property, "property")?)?;
        let cert = read_str(cert, "cert")?;
        let opts = options(fuel);
        let limits = Limits {
            fuel: opts.fuel,
            ..Limits::default()
        };
        let cexs = harness::run_property(prog, &StdFpc, spec, cert, &opts, &limits)?;
        let value = Value::Array(
            cexs.iter()
                .map(|c| {
                    let bindings: Map<String, Value> =
                        c.bindings.iter().map(|(v, t)| (v.clone(), Value::String(t.to_string()))).collect();
                    json!({ "bindings": bindings, "cert": c.cert.to_string() })
                })
                .collect(),
        );
        write_json(out_json, &value)
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pbt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
