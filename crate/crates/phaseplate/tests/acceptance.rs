//! Verification suite: one test and one printed line per criterion.
//!
//! The solver-backed criteria share cached propagation runs, so the heavy
//! 1024 x 1024 passes execute once no matter how tests interleave. Expect
//! several minutes of wall time on one core.

use phaseplate::acceptance::{self, CriterionResult};

fn check(result: CriterionResult) {
    println!("{result}");
    assert!(result.passed, "{result}");
}

#[test]
fn criterion_1_reference_values() {
    check(acceptance::reference_values());
}

#[test]
fn criterion_2_loop_phases() {
    check(acceptance::loop_phases());
}

#[test]
fn criterion_3_plate_matches_loop() {
    check(acceptance::plate_matches_loop());
}

#[test]
fn criterion_4_analytic_shifts() {
    check(acceptance::analytic_shifts());
}

#[test]
fn criterion_5_solver_shifts() {
    check(acceptance::solver_shifts());
}

#[test]
fn criterion_6_string_angles() {
    check(acceptance::string_angles());
}

#[test]
fn criterion_7_dispersion_immunity() {
    check(acceptance::dispersion_immunity());
}

#[test]
fn criterion_8_flux_periodicity() {
    check(acceptance::flux_periodicity());
}

#[test]
fn criterion_9_free_packet_fidelity() {
    check(acceptance::free_packet_fidelity());
}
