//! Invariants of the kernel and harness, checked over random bounds and
//! seeds.

mod common;

use common::*;
use pbt_core::fpclib::StdFpc;
use pbt_core::harness::{self, Limits};
use pbt_core::syntax::parse_term;
use pbt_core::terms::Term;
use proptest::prelude::*;
use std::collections::HashSet;

fn solutions(file: &str, goal: &str, cert: &str) -> HashSet<String> {
    let prog = load(file);
    check_solutions(&StdFpc, &prog, goal, cert, false, usize::MAX, 1_000_000)
        .expect("bounded search")
        .iter()
        .map(render)
        .collect()
}

fn list_len(t: &Term) -> usize {
    let (_, args) = t.spine();
    if args.len() == 2 {
        1 + list_len(args[1])
    } else {
        0
    }
}

/// Closed untyped lambda terms over `app` and `lam`.
fn closed_exp() -> impl Strategy<Value = String> {
    fn under(scope: u32, depth: u32) -> BoxedStrategy<String> {
        let var = (0..scope.max(1)).prop_map(|i| format!("x{i}"));
        let lam_body = if depth == 0 {
            Just(format!("lam x{scope}\\ x{scope}")).boxed()
        } else {
            under(scope + 1, depth - 1)
                .prop_map(move |b| format!("lam x{scope}\\ {b}"))
                .boxed()
        };
        if depth == 0 {
            return if scope == 0 { lam_body } else { var.boxed() };
        }
        let app = (under(scope, depth - 1), under(scope, depth - 1)).prop_map(|(f, a)| format!("app ({f}) ({a})"));
        if scope == 0 {
            prop_oneof![lam_body, app].boxed()
        } else {
            prop_oneof![var, lam_body, app].boxed()
        }
    }
    under(0, 4)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn raising_the_height_keeps_every_solution(h in 0u32..4) {
        let small = solutions("lists.sl", "nlist L", &format!("height {h}"));
        let large = solutions("lists.sl", "nlist L", &format!("height {}", h + 1));
        prop_assert!(small.is_subset(&large));
    }

    #[test]
    fn pairing_commutes(h in 0u32..5, n in 0u32..9) {
        let a = format!("height {h}");
        let b = format!("sze {n} _");
        let ab = solutions("lambda.sl", "is_exp M", &format!("{a} <c> {b}"));
        let ba = solutions("lambda.sl", "is_exp M", &format!("{b} <c> {a}"));
        prop_assert_eq!(ab, ba);
    }

    #[test]
    fn sampling_is_a_function_of_the_seed(seed in any::<u64>()) {
        let prog = load("lists.sl");
        let spec = harness::property(&prog, "rev_id").unwrap();
        let run = || harness::sample(&prog, &StdFpc, spec, "noweight", 15, seed, &Limits::default()).unwrap();
        let (a, b) = (run(), run());
        prop_assert_eq!(a.values, b.values);
        prop_assert_eq!(a.counterexamples.len(), b.counterexamples.len());
    }

    #[test]
    fn printed_terms_parse_back(src in closed_exp()) {
        let prog = load("lambda.sl");
        let (_, t) = parse_term(&src, &prog).unwrap();
        let (_, back) = parse_term(&t.to_string(), &prog).unwrap();
        prop_assert_eq!(back, t);
    }
}

proptest! {
    // Shrinking runs many nested searches per case.
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn counterexamples_replay_and_shrink_no_larger(seed in 0u64..1_000) {
        let prog = load("lists.sl");
        let spec = harness::property(&prog, "rev_id").unwrap();
        let limits = Limits::default();
        let report = harness::sample(&prog, &StdFpc, spec, "noweight", 2, seed, &limits).unwrap();
        for cex in &report.counterexamples {
            let printed: Vec<(String, String)> = cex.bindings.iter().map(|(v, t)| (v.clone(), t.to_string())).collect();
            prop_assert!(harness::replay(&prog, spec, &printed, limits.fuel).unwrap());
            let small = harness::shrink(&prog, &StdFpc, spec, cex, &limits).unwrap();
            prop_assert!(list_len(small.get("Xs").unwrap()) <= list_len(cex.get("Xs").unwrap()));
        }
    }
}

#[test]
fn weighted_sampling_matches_the_geometric_mean() {
    // With weights [1, 3] a list continues with probability 3/4, so its
    // length is geometric with mean 3 and variance 12.
    let prog = load("lists.sl");
    let spec = harness::property(&prog, "rev_id").unwrap();
    let draws = 4_000;
    let report = harness::sample(&prog, &StdFpc, spec, "noweight", draws, 99, &Limits::default()).unwrap();
    let lens: Vec<f64> = report.values.iter().map(|v| list_len(&v[0].1) as f64).collect();
    assert_eq!(lens.len(), draws);
    let mean = lens.iter().sum::<f64>() / draws as f64;
    let sigma = (12.0 / draws as f64).sqrt();
    assert!((mean - 3.0).abs() <= 3.0 * sigma, "mean length {mean}");
}
