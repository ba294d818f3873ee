mod common;

use common::*;

#[test]
fn nlist_by_height_matches_enumerator() {
    let prog = load("lists.sl");
    for h in 0..=4 {
        let got = check_values(&prog, "nlist L", &format!("height {h}"), "L");
        let want = nlists_by_height(h);
        assert_eq!(got.len(), as_set(&got).len(), "duplicate proofs at height {h}");
        assert_eq!(as_set(&got), as_set(&want), "height {h}");
    }
}

#[test]
fn nlist_by_size_matches_enumerator() {
    let prog = load("lists.sl");
    for n in 0..=8 {
        let got = check_values(&prog, "nlist L", &format!("sze {n} _"), "L");
        assert_eq!(as_set(&got), as_set(&nlists_by_size(n)), "size {n}");
    }
}

#[test]
fn is_exp_by_height_matches_enumerator() {
    let prog = load("lambda.sl");
    for h in 0..=4 {
        let got = check_values(&prog, "is_exp M", &format!("height {h}"), "M");
        assert_eq!(as_set(&got), as_set(&exps_by_height(h, 0)), "height {h}");
    }
}

#[test]
fn is_exp_by_size_matches_enumerator() {
    let prog = load("lambda.sl");
    for n in 0..=8 {
        let got = check_values(&prog, "is_exp M", &format!("sze {n} _"), "M");
        assert_eq!(as_set(&got), as_set(&exps_by_size(n)), "size {n}");
    }
}

#[test]
fn enumerator_counts_are_plausible() {
    // Hand-counted: height 2 gives nil and z :: nil; closed terms of height 3
    // are lam x\ x, lam x\ lam y\ y, lam x\ lam y\ x, lam x\ app x x and
    // app (lam x\ x) (lam x\ x).
    assert_eq!(nlists_by_height(2).len(), 2);
    assert_eq!(exps_by_height(3, 0).len(), 5);
    assert_eq!(exps_by_size(2).len(), 1);
}
