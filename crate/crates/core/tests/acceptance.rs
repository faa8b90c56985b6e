//! Acceptance suite: one test per criterion, each printing a single
//! PASS/FAIL line with the measured values and their bounds.
//!
//! Run with `cargo test -p lohe-core --test acceptance -- --nocapture`.

use lohe_core::experiments::{self, CheckResult, Settings};
use lohe_core::Result;

const SEED: u64 = 7;

fn run(criterion: u32, f: fn(&Settings) -> Result<CheckResult>) {
    let result = f(&Settings::seeded(SEED)).unwrap_or_else(|e| panic!("criterion {criterion}: {e}"));
    println!("criterion {criterion:>2}: {}", result.summary_line());
    for note in &result.notes {
        println!("              {note}");
    }
    assert!(result.passed(), "criterion {criterion} failed");
}

#[test]
fn c01_monoid_laws() {
    run(1, experiments::monoid_laws);
}

#[test]
fn c02_commutativity_up_to_shuffle() {
    run(2, experiments::commutativity);
}

#[test]
fn c03_norm_conservation() {
    run(3, experiments::conservation);
}

#[test]
fn c04_decomposition() {
    run(4, experiments::decomposition);
}

#[test]
fn c05_permutation_equivariance() {
    run(5, experiments::permutation_equivariance);
}

#[test]
fn c06_model_reductions() {
    run(6, experiments::reductions);
}

#[test]
fn c07_pauli_equivalence() {
    run(7, experiments::pauli_equivalence);
}

#[test]
fn c08_homogeneous_aggregation() {
    run(8, experiments::aggregation_homogeneous);
}

#[test]
fn c09_double_sphere_aggregation() {
    run(9, experiments::double_sphere_aggregation);
}

#[test]
fn c10_practical_aggregation() {
    run(10, experiments::aggregation_practical);
}

#[test]
fn c11_partial_locking() {
    run(11, experiments::partial_locking);
}

#[test]
fn c12_residual_decay() {
    run(12, experiments::residual_decay);
}

#[test]
fn c13_gradient_potential() {
    run(13, experiments::gradient_potential);
}

#[test]
fn c14_integrator_order() {
    run(14, experiments::integrator_order);
}
