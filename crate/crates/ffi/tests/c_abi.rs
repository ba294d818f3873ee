use pbt_ffi::*;
use std::ffi::{CStr, CString};
use std::ptr;

const LISTS: &str = "mode horn. ctor z 0. ctor s 1. ctor nil 0. ctor cons 2.\n\
    isnat z. isnat (s N) :- isnat N.\n\
    nlist nil. nlist (X :: L) :- isnat X, nlist L.\n\
    prop small := gen: isnat N. then: N = z.";

fn parse(src: &str) -> *mut PbtProgram {
    let src = CString::new(src).unwrap();
    let mut prog = ptr::null_mut();
    assert_eq!(unsafe { pbt_program_parse(src.as_ptr(), &mut prog) }, PbtStatus::Ok);
    prog
}

fn take_json(s: *mut std::ffi::c_char) -> serde_json::Value {
    let text = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { pbt_string_free(s) };
    serde_json::from_str(&text).unwrap()
}

fn last_error() -> String {
    let p = pbt_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn solve_returns_bindings() {
    let prog = parse(LISTS);
    let goal = CString::new("nlist L").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { pbt_solve(prog, goal.as_ptr(), 2, 0, &mut out) }, PbtStatus::Ok);
    let v = take_json(out);
    assert_eq!(v[0]["bindings"]["L"], "nil");
    assert_eq!(v[1]["bindings"]["L"], "z :: nil");
    assert_eq!(v.as_array().unwrap().len(), 2);
    unsafe { pbt_program_free(prog) };
}

#[test]
fn check_bounds_solutions_by_certificate() {
    let prog = parse(LISTS);
    let goal = CString::new("isnat N").unwrap();
    let cert = CString::new("height 2").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { pbt_check(prog, goal.as_ptr(), cert.as_ptr(), 0, 0, &mut out) },
        PbtStatus::Ok
    );
    let v = take_json(out);
    let ns: Vec<&str> = v.as_array().unwrap().iter().map(|s| s["bindings"]["N"].as_str().unwrap()).collect();
    assert_eq!(ns, ["z", "s z"]);
    unsafe { pbt_program_free(prog) };
}

#[test]
fn property_counterexamples() {
    let prog = parse(LISTS);
    let name = CString::new("small").unwrap();
    let cert = CString::new("height 2").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { pbt_run_property(prog, name.as_ptr(), cert.as_ptr(), 0, &mut out) },
        PbtStatus::Ok
    );
    let v = take_json(out);
    assert_eq!(v[0]["bindings"]["N"], "s z");
    let missing = CString::new("nope").unwrap();
    let status = unsafe { pbt_run_property(prog, missing.as_ptr(), cert.as_ptr(), 0, &mut out) };
    assert_eq!(status, PbtStatus::UnknownProperty);
    assert!(last_error().contains("nope"));
    unsafe { pbt_program_free(prog) };
}

#[test]
fn errors_are_reported_by_status() {
    let bad = CString::new("isnat z").unwrap();
    let mut prog = ptr::null_mut();
    assert_eq!(unsafe { pbt_program_parse(bad.as_ptr(), &mut prog) }, PbtStatus::Syntax);
    assert!(prog.is_null());
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { pbt_program_parse(ptr::null(), &mut prog) }, PbtStatus::NullArgument);
    let goal = CString::new("isnat N").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { pbt_solve(ptr::null(), goal.as_ptr(), 0, 0, &mut out) },
        PbtStatus::NullArgument
    );
    let prog = parse(LISTS);
    // isnat N has infinitely many solutions; a tiny budget runs out.
    assert_eq!(unsafe { pbt_solve(prog, goal.as_ptr(), 0, 5, &mut out) }, PbtStatus::Runtime);
    unsafe {
        pbt_program_free(prog);
        pbt_program_free(ptr::null_mut());
        pbt_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_every_export() {
    let header = include_str!("../include/pbt.h");
    for f in [
        "pbt_last_error",
        "pbt_program_parse",
        "pbt_program_free",
        "pbt_solve",
        "pbt_check",
        "pbt_run_property",
        "pbt_string_free",
        "typedef struct PbtProgram PbtProgram",
        "PBT_STATUS_OK = 0",
    ] {
        assert!(header.contains(f), "{f} missing from header");
    }
}
