//! Acceptance gate: every criterion of the verification suite must pass
//! within its wall-clock budget. One pass/fail line per criterion goes to
//! stdout (visible under `--nocapture` or on failure).

use arboreal::suite::{run_criterion, Profile, SuiteOptions};
use std::time::{Duration, Instant};

fn check(id: u32, budget: Duration, opts: &SuiteOptions) {
    let started = Instant::now();
    let report = run_criterion(id, opts).expect("criterion runner must not error out");
    let elapsed = started.elapsed();
    println!(
        "[{}] criterion {} ({}) in {:.2?}: {}",
        if report.passed { "PASS" } else { "FAIL" },
        report.id,
        report.name,
        elapsed,
        report.detail
    );
    assert!(
        report.passed,
        "criterion {id} ({}) failed: {}",
        report.name, report.detail
    );
    assert!(
        elapsed < budget,
        "criterion {id} exceeded its {budget:?} budget: {elapsed:?}"
    );
}

fn quick() -> SuiteOptions {
    SuiteOptions::default()
}

#[test]
fn acceptance_1_group_algebra() {
    check(1, Duration::from_secs(5), &quick());
}

#[test]
fn acceptance_2_root_unit_multiplicativity() {
    check(2, Duration::from_secs(30), &quick());
}

#[test]
fn acceptance_3_pink_closure_orders_full() {
    // the full profile includes the order-only closure at (r, n) = (2, 5)
    let opts = SuiteOptions {
        profile: Profile::Full,
        ..SuiteOptions::default()
    };
    check(3, Duration::from_secs(600), &opts);
}

#[test]
fn acceptance_4_generator_membership() {
    check(4, Duration::from_secs(5), &quick());
}

#[test]
fn acceptance_5_consistency_index_ratio() {
    check(5, Duration::from_secs(60), &quick());
}

#[test]
fn acceptance_6_frobenius_trees() {
    check(6, Duration::from_secs(120), &quick());
}

#[test]
fn acceptance_7_square_class_conditions() {
    check(7, Duration::from_secs(30), &quick());
}

#[test]
fn acceptance_8_negative_controls() {
    check(8, Duration::from_secs(30), &quick());
}
