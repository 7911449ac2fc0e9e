//! Acceptance suite: one test per criterion.
//!
//! Run with `cargo test --release --test acceptance -- --nocapture --test-threads 1`
//! to see the PASS/FAIL line and the details of every criterion.

use exprgg::verify::{self, CriterionOutcome, DEFAULT_SEED};

fn report(outcome: CriterionOutcome) {
    println!("{}", outcome.summary_line());
    for line in &outcome.details {
        println!("    {line}");
    }
    assert!(outcome.passed, "{}", outcome.summary_line());
}

#[test]
fn criterion_01_p21_product_form() {
    report(verify::criterion_1(DEFAULT_SEED));
}

#[test]
fn criterion_02_two_state_stationary_law() {
    report(verify::criterion_2(DEFAULT_SEED));
}

#[test]
fn criterion_03_connectivity_vanishes_along_n() {
    report(verify::criterion_3(DEFAULT_SEED));
}

#[test]
fn criterion_04_component_chain() {
    report(verify::criterion_4(DEFAULT_SEED));
}

#[test]
fn criterion_05_hitting_time() {
    report(verify::criterion_5(DEFAULT_SEED));
}

#[test]
fn criterion_06_transition_probabilities_mc() {
    report(verify::criterion_6(DEFAULT_SEED));
}

#[test]
fn criterion_07_degree_laws() {
    report(verify::criterion_7(DEFAULT_SEED));
}

#[test]
fn criterion_08_snapshot_laws_mc() {
    report(verify::criterion_8(DEFAULT_SEED));
}

#[test]
fn criterion_09_component_laws_decay() {
    report(verify::criterion_9(DEFAULT_SEED));
}

#[test]
fn criterion_10_extreme_distance_ratios() {
    report(verify::criterion_10(DEFAULT_SEED));
}

#[test]
fn criterion_11_gap_process_fidelity() {
    report(verify::criterion_11(DEFAULT_SEED));
}
