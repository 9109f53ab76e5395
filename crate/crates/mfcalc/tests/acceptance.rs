//! The acceptance gate: runs every criterion at its stated (zero) tolerance
//! and prints one pass/fail line per criterion.

use mfcalc::acceptance::{run_all, DEFAULT_SEED};

#[test]
fn acceptance_suite() {
    let results = run_all(DEFAULT_SEED);
    let mut all_pass = true;
    for r in &results {
        let status = if r.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2} [{status}] {} — {}", r.id, r.name, r.detail);
        all_pass &= r.pass;
    }
    assert!(all_pass, "some acceptance criteria failed");
    assert_eq!(results.len(), 12);
}
