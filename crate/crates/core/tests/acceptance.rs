//! Acceptance gate. Each test wraps one criterion runner and fails when
//! the criterion fails; the harness line doubles as the scoreboard entry.
//! Run with `--nocapture` to see the detail lines of passing criteria.

use turanlab::acceptance;

fn check(result: acceptance::CriterionResult) {
    println!("{}", result.line());
    assert!(result.passed, "{}", result.line());
}

#[test]
fn criterion_01_exact_vanishing_probability() {
    check(acceptance::criterion_1());
}

#[test]
fn criterion_02_monte_carlo_vanishing_frequency() {
    check(acceptance::criterion_2());
}

#[test]
fn criterion_03_layer_edge_density() {
    check(acceptance::criterion_3());
}

#[test]
fn criterion_04_expected_edges_and_multi_edges() {
    check(acceptance::criterion_4());
}

#[test]
fn criterion_05_block_permutation_symmetry() {
    check(acceptance::criterion_5());
}

#[test]
fn criterion_06_path_counter_oracle_equivalence() {
    check(acceptance::criterion_6());
}

#[test]
fn criterion_07_deletion_soundness_and_freeness() {
    check(acceptance::criterion_7());
}

#[test]
fn criterion_08_density_scaling_exponents() {
    check(acceptance::criterion_8());
}

#[test]
fn criterion_09_completion_dichotomy_report() {
    check(acceptance::criterion_9());
}

#[test]
fn criterion_10_seeded_determinism() {
    check(acceptance::criterion_10());
}
