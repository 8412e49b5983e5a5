//! The full verification battery, one test per criterion.
//!
//! Each test prints a single `PASS name: detail` / `FAIL name: detail` line
//! (visible with `cargo test --test acceptance -- --nocapture`) and fails if
//! its criterion does.

use hermrel::suite;

fn check(outcome: suite::Outcome) {
    println!("{}", outcome.line_with_timing());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn exhaustive_f4_sweep() {
    check(suite::exhaustive_f4_sweep());
}

#[test]
fn sampled_congruence_bounds() {
    check(suite::sampled_congruence_bounds());
}

#[test]
fn class_table_exact() {
    check(suite::class_table_exact());
}

#[test]
fn hermitian_counts() {
    check(suite::hermitian_counts());
}

#[test]
fn solver_oracles() {
    check(suite::solver_oracles());
}

#[test]
fn equivalence_oracle_f4() {
    check(suite::equivalence_oracle_f4());
}

#[test]
fn property_suite_f9() {
    check(suite::property_suite_f9());
}

#[test]
fn residual_law() {
    check(suite::residual_law());
}

#[test]
fn determinism() {
    check(suite::determinism());
}
