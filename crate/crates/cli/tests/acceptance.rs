//! The acceptance gate: one test per criterion of the verification suite,
//! each printing its pass or fail line with the measured time.

use treeloc::suite::run_criterion;

fn check(id: usize) {
    let outcome = run_criterion(id, 0);
    println!(
        "criterion {:>2}: {} ({} ms) {}: {}",
        outcome.id,
        if outcome.passed { "pass" } else { "FAIL" },
        outcome.millis,
        outcome.title,
        outcome.detail
    );
    assert!(
        outcome.passed,
        "criterion {} ({}) failed: {}",
        outcome.id, outcome.title, outcome.detail
    );
}

#[test]
fn criterion_01_extraction_selections() {
    check(1);
}

#[test]
fn criterion_02_family_size_bounds() {
    check(2);
}

#[test]
fn criterion_03_grouped_extraction() {
    check(3);
}

#[test]
fn criterion_04_tree_cover_minimums() {
    check(4);
}

#[test]
fn criterion_05_predictor_cover_minimums() {
    check(5);
}

#[test]
fn criterion_06_cover_monotonicity() {
    check(6);
}

#[test]
fn criterion_07_deep_pruning() {
    check(7);
}

#[test]
fn criterion_08_avoidance_disjointness() {
    check(8);
}

#[test]
fn criterion_09_predictor_tree_correspondence() {
    check(9);
}

#[test]
fn criterion_10_cover_composition() {
    check(10);
}

#[test]
fn criterion_11_consolidation() {
    check(11);
}

#[test]
fn criterion_12_slalom_growth() {
    check(12);
}
