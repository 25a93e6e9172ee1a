//! The numbered acceptance checks behind `hotspot-lab verify`.
//!
//! Twelve checks ladder from pure algebra (characteristic exponents) through
//! profile closed forms and reconstruction identities up to full bundled
//! scenario runs (conservation, limit laws, rates, uniqueness flags, and a
//! cross-check against the independent planar solver). Scenario runs are
//! cached so checks that share a run pay for it once; the cache also
//! serializes the heavy runs so their internal parallelism does not fight
//! for cores.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};

use hotspot_core::hotspot::{reconstruct_field, solve_implicit_radius, CurvatureFlag};
use hotspot_core::potential::{characteristic_exponents, lambda_star, PotentialSpec};
use hotspot_core::profile::{compute_drift, compute_gamma, compute_pi, solve_profile};
use hotspot_core::sphere::eval_harmonic;

use crate::oracle2d::{solve_polar, PolarSettings};
use crate::pipeline::{cmd_run, Overrides, RunArtifacts};
use crate::scenario::{load_scenario, InitialData};

/// Where the bundled scenarios live and how runs are overridden.
#[derive(Debug, Clone)]
pub struct SuiteConfig {
    pub scenarios_dir: PathBuf,
    pub out_root: PathBuf,
    pub grid_cells: Option<usize>,
    pub t_end: Option<f64>,
    pub seed: u64,
}

/// Result of one numbered check.
#[derive(Debug, Clone)]
pub struct CriterionOutcome {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionOutcome {
    pub fn line(&self) -> String {
        format!(
            "criterion {:2} ({}): {} — {}",
            self.id,
            self.name,
            if self.passed { "PASS" } else { "FAIL" },
            self.detail
        )
    }
}

pub const CRITERION_NAMES: [&str; 12] = [
    "exponent algebra",
    "closed-form profiles",
    "drift functional closed forms",
    "reconstruction identity",
    "pairing conservation",
    "center-of-mass limit",
    "escape rate and direction",
    "bounded confinement radius",
    "implicit rate law",
    "uniqueness flags",
    "self-similar attractor",
    "planar cross-check",
];

/// Scenarios that exercise an evolution (criterion 5 checks them all).
const EVOLVING_SCENARIOS: [&str; 10] = [
    "heat_com_N2",
    "heat_com_N3",
    "hardy_escape_N3",
    "lorentz_bounded_N3",
    "well_A_negative",
    "decay_rate_N4",
    "logsub_N2",
    "decay_logN3",
    "selfsim_hardy_N3",
    "brute2d_N2",
];

pub struct Suite {
    cfg: SuiteConfig,
    cache: Mutex<HashMap<String, Arc<Result<RunArtifacts, String>>>>,
}

impl Suite {
    pub fn new(cfg: SuiteConfig) -> Self {
        Suite {
            cfg,
            cache: Mutex::new(HashMap::new()),
        }
    }

    /// Run (or fetch) a bundled scenario. The lock is held across the run
    /// on purpose: scenario runs already saturate the machine internally.
    fn run(&self, stem: &str) -> Arc<Result<RunArtifacts, String>> {
        let mut cache = self.cache.lock().unwrap();
        if let Some(hit) = cache.get(stem) {
            return hit.clone();
        }
        let config = self.cfg.scenarios_dir.join(format!("{stem}.toml"));
        let ov = Overrides {
            out: Some(self.cfg.out_root.join(stem)),
            grid_cells: self.cfg.grid_cells,
            t_end: self.cfg.t_end,
            seed: self.cfg.seed,
            quiet: true,
        };
        let res = Arc::new(cmd_run(&config, &ov).map_err(|e| format!("{stem}: {e}")));
        cache.insert(stem.to_string(), res.clone());
        res
    }

    pub fn criterion(&self, id: usize) -> CriterionOutcome {
        let (passed, detail) = match id {
            1 => exponent_algebra(),
            2 => closed_form_profiles(),
            3 => drift_closed_forms(),
            4 => reconstruction_identity(),
            5 => self.pairing_conservation(),
            6 => self.center_of_mass_limit(),
            7 => self.escape_rate(),
            8 => self.bounded_radius(),
            9 => self.implicit_rate_law(),
            10 => self.uniqueness_flags(),
            11 => self.self_similar_attractor(),
            12 => self.planar_cross_check(),
            _ => (false, format!("no criterion {id}")),
        };
        CriterionOutcome {
            id,
            name: CRITERION_NAMES[id - 1],
            passed,
            detail,
        }
    }

    pub fn run_all(&self) -> Vec<CriterionOutcome> {
        (1..=12).map(|id| self.criterion(id)).collect()
    }

    // -- 5 -----------------------------------------------------------------

    fn pairing_conservation(&self) -> (bool, String) {
        let mut lines = Vec::new();
        let mut ok = true;
        for stem in EVOLVING_SCENARIOS {
            match &*self.run(stem) {
                Ok(arts) => {
                    let v = arts
                        .verdicts
                        .iter()
                        .find(|v| v.name == "conservation")
                        .expect("every run checks conservation");
                    if !v.passed {
                        ok = false;
                    }
                    lines.push(format!("{stem}: {}", v.detail));
                }
                Err(e) => {
                    ok = false;
                    lines.push(format!("{stem}: run failed — {e}"));
                }
            }
        }
        (ok, lines.join("; "))
    }

    // -- 6 -----------------------------------------------------------------

    fn center_of_mass_limit(&self) -> (bool, String) {
        let mut lines = Vec::new();
        let mut ok = true;
        for stem in ["heat_com_N2", "heat_com_N3"] {
            match &*self.run(stem) {
                Ok(arts) => {
                    let com = match arts.decomp.center_of_mass() {
                        Some(c) => c,
                        None => {
                            ok = false;
                            lines.push(format!("{stem}: no center of mass"));
                            continue;
                        }
                    };
                    let com_norm = norm(&com);
                    let last = arts.trajectory.records.last().unwrap();
                    let x = last.maximizers.first().cloned().unwrap_or_default();
                    let d = dist(&x, &com);
                    let tol = 0.02 * com_norm + arts.h_fine;
                    if d > tol {
                        ok = false;
                    }
                    lines.push(format!(
                        "{stem}: |x*(t={:.0}) − com| = {d:.2e} (tolerance {tol:.2e})",
                        last.t
                    ));
                }
                Err(e) => {
                    ok = false;
                    lines.push(format!("{stem}: run failed — {e}"));
                }
            }
        }
        (ok, lines.join("; "))
    }

    // -- 7 -----------------------------------------------------------------

    fn escape_rate(&self) -> (bool, String) {
        match &*self.run("hardy_escape_N3") {
            Ok(arts) => {
                let Some(fit) = &arts.fit else {
                    return (false, "no rate fit produced".into());
                };
                let target = std::f64::consts::SQRT_2;
                let d_exp = (fit.exponent - 0.5).abs();
                let d_coef = (fit.coefficient - target).abs() / target;
                let pred = arts.prediction.as_ref().unwrap();
                let angle = match (&pred.direction, arts.trajectory.records.last()) {
                    (Some(dir), Some(rec)) => rec
                        .maximizers
                        .first()
                        .map(|x| angle_deg(x, dir))
                        .unwrap_or(180.0),
                    _ => 180.0,
                };
                let ok = d_exp <= 0.02 && d_coef <= 0.05 && angle <= 5.0;
                (
                    ok,
                    format!(
                        "exponent {:.4} (|Δ| = {d_exp:.2e} ≤ 0.02), coefficient {:.4} \
                         vs √2 (rel {d_coef:.2e} ≤ 0.05), direction {angle:.2}° ≤ 5°",
                        fit.exponent, fit.coefficient
                    ),
                )
            }
            Err(e) => (false, format!("run failed — {e}")),
        }
    }

    // -- 8 -----------------------------------------------------------------

    fn bounded_radius(&self) -> (bool, String) {
        let mut lines = Vec::new();
        let mut ok = true;
        for stem in ["lorentz_bounded_N3", "well_A_negative"] {
            match &*self.run(stem) {
                Ok(arts) => {
                    let p0 = &arts.profiles[0];
                    let pi = compute_pi(p0);
                    let min_pi = pi.min_pi.unwrap_or(f64::NAN);
                    let tol = 2.0 * arts.h_fine;
                    let t_end = arts.trajectory.records.last().unwrap().t;
                    let window_lo = t_end / 10.0;
                    let mut worst_r = 0.0f64;
                    for rec in &arts.trajectory.records {
                        if rec.t < window_lo {
                            continue;
                        }
                        let r = rec
                            .radial_radius
                            .or_else(|| rec.maximizers.first().map(|x| norm(x)))
                            .unwrap_or(f64::NAN);
                        worst_r = worst_r.max((r - min_pi).abs());
                    }
                    let mut line = format!(
                        "{stem}: max |radius − min Π| = {worst_r:.2e} over the final \
                         decade (tolerance {tol:.2e})"
                    );
                    let mut pass = worst_r <= tol;
                    let pred = arts.prediction.as_ref().unwrap();
                    if let Some(limit) = &pred.limit_point {
                        let last = arts.trajectory.records.last().unwrap();
                        if let Some(x) = last.maximizers.first() {
                            let d = dist(x, limit);
                            pass = pass && d <= tol;
                            line.push_str(&format!(
                                ", |x* − limit| = {d:.2e} at t = {:.0}",
                                last.t
                            ));
                        }
                    }
                    if !pass {
                        ok = false;
                    }
                    lines.push(line);
                }
                Err(e) => {
                    ok = false;
                    lines.push(format!("{stem}: run failed — {e}"));
                }
            }
        }
        (ok, lines.join("; "))
    }

    // -- 9 -----------------------------------------------------------------

    fn implicit_rate_law(&self) -> (bool, String) {
        let mut lines = Vec::new();
        let mut ok = true;

        // Implicit relation vs. the closed-form tail law, straight from the
        // tabulated profile (no evolution involved).
        let spec = PotentialSpec::decaying(4, 0.15, 3.0).expect("valid family");
        match solve_profile(&spec, 0, 250.0) {
            Ok(p0) => {
                let scale = 2.0 * 0.15 / (p0.c_infinity * (4.0 - 3.0));
                let mut worst = 0.0f64;
                for &t in &[1e4, 1e5, 1e6] {
                    match solve_implicit_radius(&p0, t) {
                        Ok(rho) => {
                            let closed = (scale * t).powf(1.0 / 3.0);
                            worst = worst.max((rho - closed).abs() / closed);
                        }
                        Err(e) => {
                            ok = false;
                            lines.push(format!("implicit solve at t = {t:.0e}: {e}"));
                        }
                    }
                }
                if worst > 0.05 {
                    ok = false;
                }
                lines.push(format!(
                    "closed form vs implicit: max rel gap {worst:.2e} at t ∈ \
                     {{1e4, 1e5, 1e6}} (tolerance 0.05)"
                ));
            }
            Err(e) => {
                ok = false;
                lines.push(format!("profile solve failed — {e}"));
            }
        }

        // Simulated radius against the implicit prediction.
        match &*self.run("decay_rate_N4") {
            Ok(arts) => match arts.verdicts.iter().find(|v| v.name == "implicit-gap") {
                Some(v) => {
                    if !v.passed {
                        ok = false;
                    }
                    lines.push(format!("decay_rate_N4: {}", v.detail));
                }
                None => {
                    ok = false;
                    lines.push("decay_rate_N4: no implicit-gap verdict".into());
                }
            },
            Err(e) => {
                ok = false;
                lines.push(format!("decay_rate_N4: run failed — {e}"));
            }
        }

        // Log-corrected subcases: monotone trend only (rate constants need
        // more decades than a desk run affords).
        for stem in ["logsub_N2", "decay_logN3"] {
            match &*self.run(stem) {
                Ok(arts) => match arts.verdicts.iter().find(|v| v.name == "monotone-escape") {
                    Some(v) => {
                        if !v.passed {
                            ok = false;
                        }
                        lines.push(format!("{stem}: {}", v.detail));
                    }
                    None => {
                        ok = false;
                        lines.push(format!("{stem}: no monotone-escape verdict"));
                    }
                },
                Err(e) => {
                    ok = false;
                    lines.push(format!("{stem}: run failed — {e}"));
                }
            }
        }

        (ok, lines.join("; "))
    }

    // -- 10 ----------------------------------------------------------------

    fn uniqueness_flags(&self) -> (bool, String) {
        let mut lines = Vec::new();
        let mut ok = true;
        for stem in [
            "heat_com_N2",
            "heat_com_N3",
            "hardy_escape_N3",
            "lorentz_bounded_N3",
        ] {
            match &*self.run(stem) {
                Ok(arts) => {
                    let pred = arts.prediction.as_ref().unwrap();
                    if !pred.uniqueness_expected {
                        lines.push(format!(
                            "{stem}: uniqueness not asserted ({})",
                            pred.uniqueness_basis
                        ));
                        continue;
                    }
                    let t_end = arts.trajectory.records.last().unwrap().t;
                    let mut bad = None;
                    for rec in &arts.trajectory.records {
                        if rec.t < t_end / 10.0 {
                            continue;
                        }
                        let definite = rec
                            .curvature
                            .first()
                            .map(|c| *c == CurvatureFlag::NegativeDefinite)
                            .unwrap_or(false);
                        if rec.multiplicity != 1 || !definite {
                            bad = Some(format!(
                                "{stem}: t = {:.3e} has multiplicity {} and curvature \
                                 {:?}",
                                rec.t,
                                rec.multiplicity,
                                rec.curvature.first()
                            ));
                            break;
                        }
                    }
                    match bad {
                        Some(msg) => {
                            ok = false;
                            lines.push(msg);
                        }
                        None => lines.push(format!(
                            "{stem}: unique negative-definite maximizer across the \
                             final decade"
                        )),
                    }
                }
                Err(e) => {
                    ok = false;
                    lines.push(format!("{stem}: run failed — {e}"));
                }
            }
        }
        (ok, lines.join("; "))
    }

    // -- 11 ----------------------------------------------------------------

    fn self_similar_attractor(&self) -> (bool, String) {
        match &*self.run("selfsim_hardy_N3") {
            Ok(arts) => {
                let m_phi = arts.decomp.m_phi;
                // Independent value: for e^{−r²/4} against U = r in N = 3,
                // the normalized pairing is 2/(3√π).
                let reference = 2.0 / (3.0 * std::f64::consts::PI.sqrt());
                let m_gap = (m_phi - reference).abs() / reference;

                let a = arts.prediction.as_ref().unwrap().a_exponent;
                let last = arts.evolutions[0].times.len() - 1;
                let t = arts.evolutions[0].times[last];
                let field =
                    match reconstruct_field(&arts.evolutions, &arts.profiles, last) {
                        Ok(f) => f,
                        Err(e) => return (false, format!("reconstruction failed — {e}")),
                    };
                let mut worst = 0.0f64;
                for i in 0..=50 {
                    let xi = 0.5 + 2.5 * i as f64 / 50.0;
                    let want = m_phi * xi.powf(a) * (-xi * xi / 4.0).exp();
                    let got = t.powf((3.0 + a) / 2.0) * field.eval_radial(xi * t.sqrt());
                    worst = worst.max((got - want).abs() / want);
                }
                let ok = m_gap <= 1e-6 && worst <= 0.03;
                (
                    ok,
                    format!(
                        "M(φ) matches 2/(3√π) to {m_gap:.1e}; rescaled profile within \
                         {worst:.2e} of M(φ)ξ^A e^(−ξ²/4) on ξ ∈ [0.5, 3] at t = {t:.0} \
                         (tolerance 0.03)"
                    ),
                )
            }
            Err(e) => (false, format!("run failed — {e}")),
        }
    }

    // -- 12 ----------------------------------------------------------------

    fn planar_cross_check(&self) -> (bool, String) {
        let run = self.run("brute2d_N2");
        let arts = match &*run {
            Ok(a) => a,
            Err(e) => return (false, format!("run failed — {e}")),
        };
        // Rebuild φ(r, θ) from the scenario's own mode list so both solvers
        // march the same data.
        let config = self.cfg.scenarios_dir.join("brute2d_N2.toml");
        let loaded = match load_scenario(&config) {
            Ok(l) => l,
            Err(e) => return (false, format!("{e}")),
        };
        let modes = match loaded.build_initial_data() {
            Ok(InitialData::Modes(m)) => m,
            Ok(_) => return (false, "expected a mode list".into()),
            Err(e) => return (false, format!("{e}")),
        };
        let phi = |r: f64, th: f64| -> f64 {
            let unit = [th.cos(), th.sin()];
            modes
                .iter()
                .map(|(k, idx, expr)| {
                    expr.eval_radial(r) * eval_harmonic(2, *k, *idx, &unit)
                })
                .sum()
        };
        let spec = arts.spec.clone();
        let v = move |r: f64| spec.v(r);
        let record_times: Vec<f64> = arts.evolutions[0]
            .times
            .iter()
            .copied()
            .filter(|&t| t > 0.0)
            .collect();
        let fields = solve_polar(&v, &phi, &record_times, &PolarSettings::default());

        let mut worst = 0.0f64;
        for (rec, field) in fields.iter().enumerate() {
            let recon =
                match reconstruct_field(&arts.evolutions, &arts.profiles, rec + 1) {
                    Ok(f) => f,
                    Err(e) => return (false, format!("reconstruction failed — {e}")),
                };
            for (i, &th) in field.thetas.iter().enumerate() {
                for (j, &r) in field.r_centers.iter().enumerate() {
                    if r > 24.0 {
                        break;
                    }
                    let x = [r * th.cos(), r * th.sin()];
                    let diff = (recon.eval(&x) - field.value(i, j)).abs();
                    worst = worst.max(diff);
                }
            }
        }
        (
            worst <= 1e-3,
            format!(
                "sup |mode reconstruction − planar ADI| = {worst:.2e} at t ∈ \
                 {{{}}} (tolerance 1.0e-3)",
                record_times
                    .iter()
                    .map(|t| format!("{t:.0}"))
                    .collect::<Vec<_>>()
                    .join(", ")
            ),
        )
    }
}

// ---------------------------------------------------------------------------
// scenario-free checks
// ---------------------------------------------------------------------------

fn exponent_algebra() -> (bool, String) {
    // Exact root cases: (N, λ, A+, A−).
    let cases = [
        (3u32, 2.0, 1.0, -3.0),
        (3, 0.0, 0.0, -1.0),
        (4, 0.0, 0.0, -2.0),
        (2, 0.0, 0.0, 0.0),
        (3, -0.25, -0.5, -0.5),
        (4, -1.0, -1.0, -1.0),
        (5, 4.0, 1.0, -4.0),
        (6, 5.0, 1.0, -5.0),
    ];
    for (n, lambda, ap, am) in cases {
        let e = match characteristic_exponents(n, lambda) {
            Ok(e) => e,
            Err(err) => return (false, format!("N = {n}, λ = {lambda}: {err}")),
        };
        if (e.a_plus - ap).abs() > 1e-12 || (e.a_minus - am).abs() > 1e-12 {
            return (
                false,
                format!(
                    "N = {n}, λ = {lambda}: got ({}, {}), want ({ap}, {am})",
                    e.a_plus, e.a_minus
                ),
            );
        }
    }
    // Property ladder: A+ strictly increasing in λ, and both roots satisfy
    // the defining quadratic.
    for n in 2..=8u32 {
        let ls = lambda_star(n);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..100 {
            let lambda = ls + 60.0 * i as f64 / 99.0;
            let e = characteristic_exponents(n, lambda).expect("λ ≥ λ*");
            if e.a_plus < prev {
                return (false, format!("A+ not monotone at N = {n}, λ = {lambda}"));
            }
            prev = e.a_plus;
            for a in [e.a_plus, e.a_minus] {
                let res = a * a + (n as f64 - 2.0) * a - lambda;
                if res.abs() > 1e-12 * (1.0 + lambda.abs()) {
                    return (
                        false,
                        format!("root residual {res:.2e} at N = {n}, λ = {lambda}"),
                    );
                }
            }
        }
    }
    (
        true,
        "8 exact root cases to 1e-12; monotone A+ and quadratic residuals over \
         100 λ samples for N = 2..8"
            .into(),
    )
}

fn closed_form_profiles() -> (bool, String) {
    let mut worst = 0.0f64;
    let mut check = |spec: &PotentialSpec, k: u32, exact: &dyn Fn(f64) -> f64| -> Result<(), String> {
        let p = solve_profile(spec, k, 100.0).map_err(|e| format!("{e}"))?;
        for i in 0..=500 {
            let r = 1e-4 * (90.0f64 / 1e-4).powf(i as f64 / 500.0);
            let want = exact(r);
            let got = p.eval(r);
            worst = worst.max((got - want).abs() / want.abs());
        }
        Ok(())
    };
    let zero3 = PotentialSpec::zero(3);
    let hardy32 = PotentialSpec::hardy(3, 2.0).expect("λ above threshold");
    let hardy2 = PotentialSpec::hardy(2, 1.0).expect("λ above threshold");
    let hardy3m = PotentialSpec::hardy(3, -0.1875).expect("λ above threshold");
    let jobs: [(&PotentialSpec, u32, Box<dyn Fn(f64) -> f64>); 5] = [
        (&zero3, 0, Box::new(|_| 1.0)),
        (&zero3, 1, Box::new(|r| r)),
        (&hardy32, 0, Box::new(|r| r)),
        (&hardy2, 0, Box::new(|r| r)),
        (&hardy3m, 0, Box::new(|r: f64| r.powf(-0.25))),
    ];
    for (spec, k, exact) in &jobs {
        if let Err(e) = check(spec, *k, exact) {
            return (false, e);
        }
    }
    (
        worst <= 1e-8,
        format!(
            "max relative error {worst:.2e} over 500 log-spaced radii per case \
             (tolerance 1e-8)"
        ),
    )
}

fn drift_closed_forms() -> (bool, String) {
    let cases: [(PotentialSpec, Box<dyn Fn(f64) -> f64>); 3] = [
        (PotentialSpec::zero(3), Box::new(|r: f64| r * r / 6.0)),
        (PotentialSpec::zero(2), Box::new(|r: f64| r * r / 4.0)),
        (
            PotentialSpec::hardy(3, 2.0).expect("λ above threshold"),
            // F = r²/(2(N + 2A+)) with A+ = 1.
            Box::new(|r: f64| r * r / 10.0),
        ),
    ];
    let mut worst = 0.0f64;
    for (spec, exact) in &cases {
        let p = match solve_profile(spec, 0, 150.0) {
            Ok(p) => p,
            Err(e) => return (false, format!("{e}")),
        };
        let drift = compute_drift(&p);
        for i in 0..=400 {
            let r = 0.1 * (100.0f64 / 0.1).powf(i as f64 / 400.0);
            let want = exact(r);
            let got = drift.eval_f(r);
            worst = worst.max((got - want).abs() / want);
        }
    }
    (
        worst <= 1e-6,
        format!("max relative error {worst:.2e} on [0.1, 100] (tolerance 1e-6)"),
    )
}

fn reconstruction_identity() -> (bool, String) {
    let lorentz_m = PotentialSpec::lorentz(3, -0.2).expect("valid family");
    let lorentz_p = PotentialSpec::lorentz(3, 0.5).expect("valid family");
    let decay = PotentialSpec::decaying(3, 0.4, 3.0).expect("valid family");
    // A positive origin coefficient: V = 2/(r²√(1+r²)), so r²V → 2 at the
    // origin and decays like 2/r beyond (θ = 1/2 bounds both ends).
    let tab = PotentialSpec::tabulated_from_fn(
        4,
        &|r| 2.0 / (r * r * (1.0 + r * r).sqrt()),
        1e-7,
        2e4,
        64,
        2.0,
        0.0,
        0.5,
    )
    .expect("valid table");
    let specs = [
        ("lorentz(-0.2)", &lorentz_m),
        ("lorentz(0.5)", &lorentz_p),
        ("decaying(0.4, 3)", &decay),
        ("origin-2 table", &tab),
    ];
    let mut worst = 0.0f64;
    let mut lines = Vec::new();
    for (name, spec) in specs {
        for k in 0..2u32 {
            let p = match solve_profile(spec, k, 1e3) {
                Ok(p) => p,
                Err(e) => return (false, format!("{name} k = {k}: {e}")),
            };
            let g = match compute_gamma(spec, &p) {
                Ok(g) => g,
                Err(e) => return (false, format!("{name} k = {k}: {e}")),
            };
            worst = worst.max(g.identity_dev);
            lines.push(format!("{name} k={k}: {:.1e}", g.identity_dev));
        }
    }
    (
        worst <= 1e-5,
        format!(
            "max relative identity deviation on [1, 1e3]: {worst:.2e} (tolerance \
             1e-5) [{}]",
            lines.join(", ")
        ),
    )
}

// ---------------------------------------------------------------------------

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

fn angle_deg(a: &[f64], b: &[f64]) -> f64 {
    let (na, nb) = (norm(a), norm(b));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (na * nb)).clamp(-1.0, 1.0).acos().to_degrees()
}
