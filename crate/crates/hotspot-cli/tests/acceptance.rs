//! Numbered acceptance checks, one test per criterion. Heavy scenario runs
//! are shared through the suite's cache, so the first test touching a
//! scenario pays for it and the rest reuse the artifacts.
//!
//! Run with `--nocapture` to see the per-criterion PASS/FAIL lines.

use std::path::PathBuf;
use std::sync::OnceLock;

use hotspot_cli::suite::{Suite, SuiteConfig};

fn suite() -> &'static Suite {
    static SUITE: OnceLock<Suite> = OnceLock::new();
    SUITE.get_or_init(|| {
        let scenarios_dir =
            PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
        let out_root = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance");
        Suite::new(SuiteConfig {
            scenarios_dir,
            out_root,
            grid_cells: None,
            t_end: None,
            seed: 0,
        })
    })
}

fn check(id: usize) {
    let outcome = suite().criterion(id);
    println!("{}", outcome.line());
    assert!(outcome.passed, "{}", outcome.line());
}

#[test]
fn criterion_01_exponent_algebra() {
    check(1);
}

#[test]
fn criterion_02_closed_form_profiles() {
    check(2);
}

#[test]
fn criterion_03_drift_functional_closed_forms() {
    check(3);
}

#[test]
fn criterion_04_reconstruction_identity() {
    check(4);
}

#[test]
fn criterion_05_pairing_conservation() {
    check(5);
}

#[test]
fn criterion_06_center_of_mass_limit() {
    check(6);
}

#[test]
fn criterion_07_escape_rate_and_direction() {
    check(7);
}

#[test]
fn criterion_08_bounded_confinement_radius() {
    check(8);
}

#[test]
fn criterion_09_implicit_rate_law() {
    check(9);
}

#[test]
fn criterion_10_uniqueness_flags() {
    check(10);
}

#[test]
fn criterion_11_self_similar_attractor() {
    check(11);
}

#[test]
fn criterion_12_planar_cross_check() {
    check(12);
}
