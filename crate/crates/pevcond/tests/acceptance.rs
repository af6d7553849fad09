//! Full verification suite as an integration test: one test per criterion,
//! each printing its pass/fail line. `pevcond verify --suite full` runs the
//! same checks from the CLI.

use pevcond::acceptance::{run_criterion, Suite};

fn check(id: usize) {
    let report = run_criterion(id, Suite::Full);
    println!("{}", report.line());
    assert!(report.passed, "{}", report.line());
}

#[test]
fn criterion_01_scalar_exactness() {
    check(1);
}

#[test]
fn criterion_02_gaussian_n2d1() {
    check(2);
}

#[test]
fn criterion_03_gaussian_n3d2() {
    check(3);
}

#[test]
fn criterion_04_goe_n2d1_n3d1() {
    check(4);
}

#[test]
fn criterion_05_universal_bound_sweep() {
    check(5);
}

#[test]
fn criterion_06_closed_form_asymptotics() {
    check(6);
}

#[test]
fn criterion_07_oracle_equivalence() {
    check(7);
}

#[test]
fn criterion_08_solver_certification() {
    check(8);
}

#[test]
fn criterion_09_invariance_suite() {
    check(9);
}

#[test]
fn criterion_10_closed_form_identities() {
    check(10);
}
