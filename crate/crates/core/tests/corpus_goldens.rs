use pbt_core::corpus::{corpus_specs, verify};

#[test]
fn every_golden_holds() {
    let mut failures = Vec::new();
    for entry in corpus_specs() {
        let prog = entry.load().expect("corpus file parses");
        for (what, golden) in entry.goldens {
            if let Err(e) = verify(&prog, golden) {
                failures.push(format!("{}: {what}: {e}", entry.file));
            }
        }
    }
    assert!(failures.is_empty(), "{}", failures.join("\n"));
}
