//! Acceptance suite at default settings. Each criterion writes one PASS/FAIL
//! line to stderr (uncaptured) and asserts at its pinned tolerance.

use std::io::Write;
use std::process::{Command, Stdio};

use isac_cli::validate::{run_criterion, CriterionReport, ValidateOptions};
use isac_core::ScenarioConfig;

fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

fn run(id: u8) -> CriterionReport {
    let r = run_criterion(id, &ScenarioConfig::default(), &ValidateOptions::default())
        .unwrap_or_else(|e| panic!("criterion {id} did not run: {e}"));
    report(&format!("{}  [{:.1} s]", r.summary_line(), r.seconds));
    r
}

fn check(id: u8) {
    let r = run(id);
    let failed: Vec<String> = r
        .checks
        .iter()
        .filter(|c| !c.pass())
        .map(|c| format!("  {} @ {:.4e}: value {:.6} ref {:.6} measure {:.4e} > {:.1e}", c.name, c.param, c.value, c.reference, c.measure, c.tolerance))
        .collect();
    assert!(r.passed(), "C{id} failed {} of {} checks:\n{}", failed.len(), r.checks.len(), failed.join("\n"));
}

#[test]
fn c01_sjb_user_outage() {
    check(1);
}

#[test]
fn c02_sjb_target_outage() {
    check(2);
}

#[test]
fn c03_lb_user_outage() {
    check(3);
}

#[test]
fn c04_lb_bound_sandwich() {
    check(4);
}

#[test]
fn c05_crb_ordering() {
    check(5);
}

#[test]
fn c06_crb_trace_identity() {
    check(6);
}

#[test]
fn c07_opportunistic_limits() {
    check(7);
}

#[test]
fn c08_genchi2_kernel() {
    check(8);
}

#[test]
fn c09_clt_moments() {
    check(9);
}

#[test]
fn c10_region_and_pareto() {
    check(10);
}

#[test]
fn c11_monotonicity() {
    check(11);
}

#[test]
fn c12_reproducible_csv() {
    let r = run(12);
    assert!(r.passed());

    let dir = tempfile::tempdir().unwrap();
    let render = |name: &str| {
        let path = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_isac"))
            .args(["validate", "--criteria", "5,6,8", "--samples", "2000", "--seed", "77", "--out"])
            .arg(&path)
            .stderr(Stdio::null())
            .status()
            .unwrap();
        assert_eq!(status.code(), Some(0));
        std::fs::read(path).unwrap()
    };
    let (a, b) = (render("a.csv"), render("b.csv"));
    assert!(!a.is_empty());
    let same = a == b;
    report(&format!("{} C12 binary validate twice with seed 77 | {} bytes, identical: {same}", if same { "PASS" } else { "FAIL" }, a.len()));
    assert!(same);
}
