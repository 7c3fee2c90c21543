//! Acceptance criteria, one test each. Every test prints a single
//! `PASS`/`FAIL` line before asserting, straight to stderr so the line shows
//! up for passing tests too. Tests take a shared lock so the runtime budgets
//! are measured one at a time.

use std::io::Write;
use std::sync::Mutex;
use std::time::Instant;

use hulthen::analysis::report::{approximation_error_report, OracleSettings, Sample};
use hulthen::analysis::verify::{self, Check, FIXTURE_ALPHAS, TREND_ALPHAS};
use hulthen::oracle::CentrifugalMode;

static SERIAL: Mutex<()> = Mutex::new(());

fn report(check: Check, seconds: f64, budget: Option<f64>) {
    let within = budget.map_or(true, |b| seconds < b);
    let ok = check.passed && within;
    let budget_note = match budget {
        Some(b) => format!(" [{seconds:.2}s, budget {b}s]"),
        None => format!(" [{seconds:.2}s]"),
    };
    let _ = writeln!(
        std::io::stderr(),
        "\n{} criterion {:>2} {}: {}{}",
        if ok { "PASS" } else { "FAIL" },
        check.id,
        check.name,
        check.detail,
        budget_note
    );
    assert!(check.passed, "criterion {} failed: {}", check.id, check.detail);
    assert!(within, "criterion {} exceeded its runtime budget: {seconds:.2}s", check.id);
}

fn run(budget: Option<f64>, f: impl FnOnce() -> Check) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let t = Instant::now();
    let c = f();
    report(c, t.elapsed().as_secs_f64(), budget);
}

#[test]
fn criterion_01_coulomb_limit() {
    run(Some(1.0), verify::coulomb_limit);
}

#[test]
fn criterion_02_minus_four_asymptote() {
    run(Some(1.0), verify::minus_four_asymptote);
}

#[test]
fn criterion_03_threshold_exactness() {
    run(Some(1.0), verify::threshold_exactness);
}

#[test]
fn criterion_04_oracle_agreement() {
    run(Some(60.0), || {
        let rows = approximation_error_report(
            &verify::fixture_states(),
            &FIXTURE_ALPHAS,
            &OracleSettings::only(CentrifugalMode::Approximated),
        )
        .expect("oracle report");
        verify::oracle_agreement(&rows)
    });
}

#[test]
fn criterion_05_quantization_self_consistency() {
    run(None, verify::quantization_self_consistency);
}

#[test]
fn criterion_06_jacobi_identity() {
    run(None, verify::jacobi_identity);
}

#[test]
fn criterion_07_node_theorem() {
    run(None, verify::node_theorem);
}

#[test]
fn criterion_08_spinor_pair_residual() {
    run(None, verify::spinor_pair_residual);
}

#[test]
fn criterion_09_intersection_existence() {
    run(Some(5.0), verify::intersection_existence);
}

#[test]
fn criterion_10_approximation_trend() {
    run(Some(120.0), || {
        let rows = approximation_error_report(
            &verify::fixture_states(),
            &TREND_ALPHAS,
            &OracleSettings::only(CentrifugalMode::Exact),
        )
        .expect("oracle report");
        verify::approximation_trend(&rows)
    });
}

#[test]
fn criterion_11_consistency_report() {
    run(None, || verify::consistency_characterized(&Sample::default()).0);
}
