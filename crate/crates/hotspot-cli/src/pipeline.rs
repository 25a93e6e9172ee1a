//! Orchestration: potential → profiles → classification → decomposition →
//! evolution → maximizer census → rate fits → reports.
//!
//! Each stage owns an exit-code class so a failing run says *which* stage
//! rejected it: 2 config parse, 3 validation (including the potential's
//! endpoint contract), 4 ambiguous classification, 5 evolution, 6 analysis.
//! All file outputs use fixed-width scientific notation so reruns of the
//! same scenario are byte-identical.

use std::path::{Path, PathBuf};

use hotspot_core::evolve::{evolve_mode, EvolveSettings, ModeEvolution};
use hotspot_core::hotspot::{
    fit_rate, predict, track_trajectory, CurvatureFlag, FitModel, HotSpotTrajectory,
    Prediction, RadiusLaw, RateFit, TrackSettings,
};
use hotspot_core::potential::{validate_condition_v, ConditionReport, PotentialSpec};
use hotspot_core::profile::{
    classify_operator, compute_gamma, compute_lambda_mass, compute_pi, compute_s,
    solve_profile, HarmonicProfile, OperatorClass, ProfileError,
};
use hotspot_core::spectral::{
    decompose, decomposition_from_modes, decomposition_grid, ModeComponent,
    ModeDecomposition,
};
use rayon::prelude::*;
use serde_json::{json, Value};

use crate::scenario::{load_scenario, InitialData, LoadedScenario, ScenarioError};

/// Command-line overrides applied on top of the scenario file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub grid_cells: Option<usize>,
    pub t_end: Option<f64>,
    pub seed: u64,
    pub quiet: bool,
}

/// Stage-tagged pipeline failure; `exit_code` is the process exit status.
#[derive(Debug)]
pub enum PipelineError {
    Scenario(ScenarioError),
    /// Tail classification could not separate the candidate models.
    Ambiguous(String),
    Evolution(String),
    Analysis(String),
    Io(String),
}

impl PipelineError {
    pub fn exit_code(&self) -> i32 {
        match self {
            PipelineError::Scenario(ScenarioError::Parse(_)) => 2,
            PipelineError::Scenario(ScenarioError::Validation(_)) => 3,
            PipelineError::Ambiguous(_) => 4,
            PipelineError::Evolution(_) => 5,
            PipelineError::Analysis(_) => 6,
            PipelineError::Io(_) => 1,
        }
    }
}

impl std::fmt::Display for PipelineError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PipelineError::Scenario(e) => write!(f, "{e}"),
            PipelineError::Ambiguous(msg) => write!(f, "ambiguous classification: {msg}"),
            PipelineError::Evolution(msg) => write!(f, "evolution error: {msg}"),
            PipelineError::Analysis(msg) => write!(f, "analysis error: {msg}"),
            PipelineError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl std::error::Error for PipelineError {}

impl From<ScenarioError> for PipelineError {
    fn from(e: ScenarioError) -> Self {
        PipelineError::Scenario(e)
    }
}

/// One named pass/fail check in the run summary.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

/// Everything a completed `run` produced, for in-process consumers.
pub struct RunArtifacts {
    pub name: String,
    pub out_dir: PathBuf,
    pub spec: PotentialSpec,
    pub profiles: Vec<HarmonicProfile>,
    pub class: Option<OperatorClass>,
    pub decomp: ModeDecomposition,
    pub evolutions: Vec<ModeEvolution>,
    pub trajectory: HotSpotTrajectory,
    pub prediction: Option<Prediction>,
    pub fit: Option<RateFit>,
    pub verdicts: Vec<Verdict>,
    pub comparison: Value,
    pub summary: String,
    /// Fine-zone cell width of the evolution grid (tolerance unit).
    pub h_fine: f64,
}

impl RunArtifacts {
    pub fn all_passed(&self) -> bool {
        self.verdicts.iter().all(|v| v.passed)
    }
}

/// Shared front half of every command: config, potential contract,
/// profiles, decomposition, and (optionally) classification.
struct Prepared {
    loaded: LoadedScenario,
    spec: PotentialSpec,
    condition: ConditionReport,
    profiles: Vec<HarmonicProfile>,
    /// `Err` carries the fit evidence when the tail was ambiguous.
    class: Option<Result<OperatorClass, Vec<(String, f64)>>>,
    decomp: ModeDecomposition,
}

fn prepare(
    config: &Path,
    ov: &Overrides,
    want_class: bool,
) -> Result<Prepared, PipelineError> {
    let mut loaded = load_scenario(config)?;
    if let Some(t) = ov.t_end {
        loaded.scenario.evolution.t_end = t;
    }
    if let Some(c) = ov.grid_cells {
        loaded.scenario.evolution.grid_cells = c;
    }
    loaded.validate()?;

    let spec = loaded.build_potential()?;
    let condition = validate_condition_v(&spec, None);
    if !condition.all_passed() {
        return Err(loaded.contract_failure(&condition).into());
    }

    let data = loaded.build_initial_data()?;
    let m_max = match &data {
        InitialData::Expression(_) => loaded.scenario.initial_data.max_degree,
        InitialData::Modes(list) => list
            .iter()
            .map(|(k, _, _)| k + 1)
            .max()
            .unwrap_or(2)
            .max(2),
    };

    let r_prof = (1.05 * loaded.domain_radius()).max(100.0);
    let profiles: Vec<HarmonicProfile> = (0..m_max)
        .into_par_iter()
        .map(|k| solve_profile(&spec, k, r_prof))
        .collect::<Result<_, _>>()
        .map_err(|e| PipelineError::Analysis(format!("profile solve: {e}")))?;

    let class = if want_class {
        Some(match classify_operator(&profiles[0], &spec) {
            Ok(c) => Ok(c),
            Err(ProfileError::AmbiguousClass { evidence }) => Err(evidence),
            Err(e) => {
                return Err(PipelineError::Analysis(format!("classification: {e}")))
            }
        })
    } else {
        None
    };

    let support = loaded.scenario.initial_data.support_radius;
    let decomp = match &data {
        InitialData::Expression(expr) => {
            decompose(&spec, &profiles, &|x: &[f64]| expr.eval(x), support, m_max)
        }
        InitialData::Modes(list) => {
            let radii = decomposition_grid(support);
            let components = list
                .iter()
                .map(|(k, idx, expr)| ModeComponent {
                    k: *k,
                    idx: *idx,
                    radial: radii.iter().map(|&r| expr.eval_radial(r)).collect(),
                })
                .collect();
            decomposition_from_modes(&spec, &profiles, radii, components)
        }
    }
    .map_err(|e| {
        PipelineError::Scenario(ScenarioError::Validation(format!(
            "`initial_data`: {e}"
        )))
    })?;

    Ok(Prepared {
        loaded,
        spec,
        condition,
        profiles,
        class,
        decomp,
    })
}

fn out_dir_for(loaded: &LoadedScenario, ov: &Overrides) -> PathBuf {
    if let Some(dir) = &ov.out {
        return dir.clone();
    }
    match &loaded.scenario.outputs.directory {
        Some(d) => PathBuf::from(d),
        None => PathBuf::from("out").join(&loaded.scenario.name),
    }
}

fn ensure_dir(dir: &Path) -> Result<(), PipelineError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| PipelineError::Io(format!("create {}: {e}", dir.display())))
}

fn write_file(path: &Path, content: &str) -> Result<(), PipelineError> {
    std::fs::write(path, content)
        .map_err(|e| PipelineError::Io(format!("write {}: {e}", path.display())))
}

/// Fixed-width scientific float for CSV cells (byte-deterministic).
fn csv_f(v: f64) -> String {
    format!("{v:.12e}")
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

/// Classification command: potential contract, tail class, the confinement
/// functionals, and the case prediction. Writes `classification.json`.
/// An ambiguous tail still writes the report, then fails with exit code 4.
pub fn cmd_classify(config: &Path, ov: &Overrides) -> Result<Value, PipelineError> {
    let prep = prepare(config, ov, true)?;
    let out_dir = out_dir_for(&prep.loaded, ov);
    ensure_dir(&out_dir)?;

    let p0 = &prep.profiles[0];
    let functionals = functional_report(&prep.spec, &prep.profiles, &prep.decomp);

    let (class_json, ambiguous_msg) = match prep.class.as_ref().unwrap() {
        Ok(c) => (class_json(c), None),
        Err(evidence) => {
            let ev: Vec<Value> = evidence
                .iter()
                .map(|(name, rms)| json!({"model": name, "rms": rms}))
                .collect();
            let msg = evidence
                .iter()
                .map(|(n, r)| format!("{n} (rms {r:.3e})"))
                .collect::<Vec<_>>()
                .join(", ");
            (json!({"ambiguous": true, "evidence": ev}), Some(msg))
        }
    };

    let prediction_json = match prep.class.as_ref().unwrap() {
        Ok(class) => {
            match predict(&prep.spec, &prep.profiles, class, &prep.decomp) {
                Ok(p) => prediction_json(&p),
                Err(e) => json!({"unavailable": format!("{e}")}),
            }
        }
        Err(_) => Value::Null,
    };

    let report = json!({
        "name": prep.loaded.scenario.name,
        "dimension": prep.spec.dimension,
        "potential": {
            "lambda1": prep.spec.lambda1,
            "lambda2": prep.spec.lambda2,
            "sup_r3_vprime": finite_or_null(prep.condition.sup_r3_vprime),
            "contract": condition_json(&prep.condition),
        },
        "classification": class_json,
        "functionals": functionals,
        "prediction": prediction_json,
        "decomposition": decomposition_json(&prep.decomp),
        "profile_tail": {
            "a_infinity": p0.a_infinity,
            "c_infinity": p0.c_infinity,
            "log_corrected": p0.log_corrected,
        },
    });

    let path = out_dir.join("classification.json");
    write_file(&path, &pretty(&report))?;

    if let Some(msg) = ambiguous_msg {
        if !ov.quiet {
            println!("classification ambiguous; report at {}", path.display());
        }
        return Err(PipelineError::Ambiguous(msg));
    }
    if !ov.quiet {
        println!("classification report: {}", path.display());
    }
    Ok(report)
}

fn class_json(c: &OperatorClass) -> Value {
    json!({
        "tag": format!("{}", c.tag),
        "a_exponent": c.a_exponent,
        "c_constant": c.c_constant,
        "log_corrected": c.log_corrected,
        "evidence": c.evidence.iter()
            .map(|(name, rms)| json!({"model": name, "rms": rms}))
            .collect::<Vec<_>>(),
    })
}

fn condition_json(report: &ConditionReport) -> Value {
    let checks: Vec<Value> = report
        .checks
        .iter()
        .map(|c| {
            json!({
                "name": c.name,
                "passed": c.passed,
                "witness_r": c.witness_r,
                "detail": c.detail,
            })
        })
        .collect();
    json!({"passed": report.all_passed(), "checks": checks})
}

fn decomposition_json(d: &ModeDecomposition) -> Value {
    json!({
        "m_phi": d.m_phi,
        "raw_pairing": d.raw_pairing,
        "total_integral": d.total_integral,
        "xi": d.xi,
        "xi_mode": d.xi_mode,
        "m_1": d.m_1,
        "tail_norm": d.tail_norm,
        "components": d.components.iter()
            .map(|c| json!({"k": c.k, "idx": c.idx}))
            .collect::<Vec<_>>(),
    })
}

fn prediction_json(p: &Prediction) -> Value {
    json!({
        "case": p.case_label,
        "description": p.case_description,
        "a_exponent": p.a_exponent,
        "law": p.radius_law.describe(),
        "alternates": p.alternate_laws.iter()
            .map(|(name, law)| json!({"name": name, "law": law.describe()}))
            .collect::<Vec<_>>(),
        "direction": p.direction,
        "limit_point": p.limit_point,
        "uniqueness_expected": p.uniqueness_expected,
        "uniqueness_basis": p.uniqueness_basis,
    })
}

/// Π, Λ, Γ₀(∞), and the selection score, with divergence reported rather
/// than fatal.
fn functional_report(
    spec: &PotentialSpec,
    profiles: &[HarmonicProfile],
    decomp: &ModeDecomposition,
) -> Value {
    let p0 = &profiles[0];
    let pi = compute_pi(p0);
    let gamma0 = match compute_gamma(spec, p0) {
        Ok(g) => match g.gamma_infinity() {
            Ok(v) => json!(v),
            Err(_) => json!("divergent"),
        },
        Err(e) => json!(format!("{e}")),
    };
    let lambda_mass = match compute_lambda_mass(spec, p0) {
        Ok(v) => json!(v),
        Err(e) => json!(format!("{e}")),
    };
    let score = if !pi.is_empty && profiles.len() > 1 {
        let s = compute_s(
            p0,
            &profiles[1],
            decomp.raw_pairing,
            decomp.xi_mode_norm(),
        );
        json!({"maximizer": s.maximizer, "value": finite_or_null(s.s_at_maximizer)})
    } else {
        Value::Null
    };
    json!({
        "pi": {
            "is_empty": pi.is_empty,
            "is_plateau": pi.is_plateau,
            "min": pi.min_pi,
            "maximizers": pi.maximizers,
            "max_u": pi.max_u,
        },
        "gamma0_infinity": gamma0,
        "lambda_mass": lambda_mass,
        "score": score,
    })
}

// ---------------------------------------------------------------------------
// run
// ---------------------------------------------------------------------------

/// Full pipeline: everything `classify` does, then evolution, maximizer
/// census, rate fitting, and report emission.
pub fn cmd_run(config: &Path, ov: &Overrides) -> Result<RunArtifacts, PipelineError> {
    let want_class = {
        // Peek at the analysis block to decide whether classification (and
        // its exit-4 path) participates at all.
        let loaded = load_scenario(config)?;
        loaded.scenario.analysis.predict
    };
    let prep = prepare(config, ov, want_class)?;
    let out_dir = out_dir_for(&prep.loaded, ov);
    ensure_dir(&out_dir)?;

    // Ambiguity aborts the run, but the evidence still lands on disk.
    let class: Option<OperatorClass> = match prep.class {
        Some(Ok(ref c)) => Some(c.clone()),
        Some(Err(ref evidence)) => {
            let ev: Vec<Value> = evidence
                .iter()
                .map(|(name, rms)| json!({"model": name, "rms": rms}))
                .collect();
            let report = json!({
                "name": prep.loaded.scenario.name,
                "classification": {"ambiguous": true, "evidence": ev},
            });
            write_file(&out_dir.join("classification.json"), &pretty(&report))?;
            let msg = evidence
                .iter()
                .map(|(n, r)| format!("{n} (rms {r:.3e})"))
                .collect::<Vec<_>>()
                .join(", ");
            return Err(PipelineError::Ambiguous(msg));
        }
        None => None,
    };

    let prediction = match &class {
        Some(c) => Some(
            predict(&prep.spec, &prep.profiles, c, &prep.decomp)
                .map_err(|e| PipelineError::Analysis(format!("prediction: {e}")))?,
        ),
        None => None,
    };

    // Evolve every kept component; the radial march is identical for all
    // harmonics of one degree, so each component gets its own labeled copy.
    let record_times = prep.loaded.record_times();
    let settings = EvolveSettings {
        cells: prep.loaded.scenario.evolution.grid_cells,
        r_dom: Some(prep.loaded.domain_radius()),
        dt_frac: prep.loaded.scenario.evolution.dt_frac,
        ..EvolveSettings::default()
    };
    let decomp = &prep.decomp;
    let evolutions: Vec<ModeEvolution> = decomp
        .components
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let profile = prep
                .profiles
                .iter()
                .find(|p| p.k == c.k)
                .expect("profiles cover every kept degree");
            let init = |r: f64| decomp.component_at(i, r);
            evolve_mode(&prep.spec, profile, &init, &record_times, &settings).map(
                |mut ev| {
                    ev.idx = c.idx;
                    ev
                },
            )
        })
        .collect::<Result<_, _>>()
        .map_err(|e| PipelineError::Evolution(format!("{e}")))?;

    let h_fine = evolutions[0].grid.h_fine;

    let trajectory = track_trajectory(
        &evolutions,
        &prep.profiles,
        &TrackSettings {
            points_per_axis: prep.loaded.scenario.analysis.scan_points,
            scan_cap: None,
        },
    )
    .map_err(|e| PipelineError::Analysis(format!("maximizer census: {e}")))?;

    let analysis = analyze(
        &prep.loaded,
        &prep.profiles,
        prediction.as_ref(),
        &trajectory,
        &evolutions,
        h_fine,
    )?;

    // ---- reports ----------------------------------------------------
    let scn = &prep.loaded.scenario;
    let formats = &scn.outputs.formats;
    let want_csv = formats.iter().any(|f| f == "csv");
    let want_json = formats.iter().any(|f| f == "json");

    let comparison = comparison_json(
        &prep, &class, prediction.as_ref(), &trajectory, &analysis, ov.seed, h_fine,
    );
    if want_json {
        write_file(&out_dir.join("comparison.json"), &pretty(&comparison))?;
    }
    if want_csv {
        write_file(
            &out_dir.join("trajectory.csv"),
            &trajectory_csv(&trajectory, prediction.as_ref(), &analysis, scn.dimension),
        )?;
        write_file(
            &out_dir.join("conservation.csv"),
            &conservation_csv(&evolutions),
        )?;
        for p in &prep.profiles {
            write_file(&out_dir.join(format!("profile_k{}.csv", p.k)), &profile_csv(p))?;
        }
    }

    let summary = summary_text(
        &prep, &class, prediction.as_ref(), &trajectory, &analysis, &out_dir,
    );
    write_file(&out_dir.join("summary.txt"), &summary)?;
    if !ov.quiet {
        print!("{summary}");
    }

    Ok(RunArtifacts {
        name: scn.name.clone(),
        out_dir,
        spec: prep.spec,
        profiles: prep.profiles,
        class,
        decomp: prep.decomp,
        evolutions,
        trajectory,
        prediction,
        fit: analysis.fit,
        verdicts: analysis.verdicts,
        comparison,
        summary,
        h_fine,
    })
}

/// Profile command: solve and tabulate U_k without evolving anything.
pub fn cmd_profile(config: &Path, ov: &Overrides) -> Result<Vec<PathBuf>, PipelineError> {
    let prep = prepare(config, ov, false)?;
    let out_dir = out_dir_for(&prep.loaded, ov);
    ensure_dir(&out_dir)?;
    let mut written = Vec::new();
    for p in &prep.profiles {
        let path = out_dir.join(format!("profile_k{}.csv", p.k));
        write_file(&path, &profile_csv(p))?;
        written.push(path);
    }
    if !ov.quiet {
        for p in &written {
            println!("wrote {}", p.display());
        }
    }
    Ok(written)
}

// ---------------------------------------------------------------------------
// analysis
// ---------------------------------------------------------------------------

struct AnalysisOut {
    fit: Option<RateFit>,
    verdicts: Vec<Verdict>,
    /// Predicted radius per trajectory record (law not evaluable → None).
    predicted: Vec<Option<f64>>,
    window: (f64, f64),
    max_drift_k0: f64,
}

fn analyze(
    loaded: &LoadedScenario,
    profiles: &[HarmonicProfile],
    prediction: Option<&Prediction>,
    traj: &HotSpotTrajectory,
    evolutions: &[ModeEvolution],
    h_fine: f64,
) -> Result<AnalysisOut, PipelineError> {
    let mut verdicts = Vec::new();

    // Conserved pairing of the fundamental mode (the solver's primary
    // correctness invariant).
    let k0 = evolutions
        .iter()
        .find(|ev| ev.k == 0 && ev.idx == 0)
        .ok_or_else(|| PipelineError::Analysis("no fundamental mode evolved".into()))?;
    let p_init = k0.pairing[0];
    let max_drift_k0 = k0
        .pairing
        .iter()
        .map(|&p| (p - p_init).abs() / p_init.abs().max(1e-300))
        .fold(0.0f64, f64::max);
    verdicts.push(Verdict {
        name: "conservation".into(),
        passed: max_drift_k0 <= 1e-3,
        detail: format!(
            "max relative pairing drift {max_drift_k0:.3e} (tolerance 1.0e-3)"
        ),
    });

    let times = traj.times();
    let radii = traj.radii();
    let t_end = *times.last().unwrap();
    let fit_decades = loaded.scenario.analysis.fit_decades;
    let t_lo = t_end / 10f64.powf(fit_decades);
    let window = (t_lo, t_end);
    let in_window: Vec<usize> = (0..times.len()).filter(|&i| times[i] >= t_lo).collect();

    let p0 = profiles.iter().find(|p| p.k == 0).unwrap();
    let predicted: Vec<Option<f64>> = match prediction {
        Some(pred) => times
            .iter()
            .map(|&t| pred.radius_law.radius_at(t, Some(p0)).ok())
            .collect(),
        None => vec![None; times.len()],
    };

    let Some(pred) = prediction else {
        return Ok(AnalysisOut {
            fit: None,
            verdicts,
            predicted,
            window,
            max_drift_k0,
        });
    };

    // Rate fit: model follows the predicted law's shape.
    let model = match pred.radius_law {
        RadiusLaw::SqrtEscape { .. } | RadiusLaw::PowerTail { .. } | RadiusLaw::Implicit => {
            FitModel::PowerLaw
        }
        RadiusLaw::LogEscape | RadiusLaw::PowerLogTail { .. } => FitModel::LogCorrected,
        RadiusLaw::Bounded { .. } | RadiusLaw::Origin => FitModel::Bounded,
    };
    let fit = fit_rate(&times, &radii, model, fit_decades)
        .map_err(|e| PipelineError::Analysis(format!("rate fit: {e}")))?;

    let log_family = pred.a_exponent.abs() <= 1e-9
        && (matches!(pred.radius_law, RadiusLaw::LogEscape)
            || pred
                .alternate_laws
                .iter()
                .any(|(_, law)| matches!(law, RadiusLaw::PowerLogTail { .. })));

    match pred.radius_law {
        RadiusLaw::SqrtEscape { a } => {
            let d_exp = (fit.exponent - 0.5).abs();
            verdicts.push(Verdict {
                name: "radius-exponent".into(),
                passed: d_exp <= 0.02,
                detail: format!(
                    "fitted {:.4} vs 0.5 (|Δ| = {d_exp:.2e}, tolerance 0.02)",
                    fit.exponent
                ),
            });
            let target = a;
            let d_coef = (fit.coefficient - target).abs() / target;
            verdicts.push(Verdict {
                name: "radius-coefficient".into(),
                passed: d_coef <= 0.05,
                detail: format!(
                    "fitted {:.4} vs {target:.4} (rel Δ = {d_coef:.2e}, tolerance 0.05)",
                    fit.coefficient
                ),
            });
            if let Some(dir) = &pred.direction {
                let last = traj.records.last().unwrap();
                if let Some(x) = last.maximizers.first() {
                    let angle = angle_deg(x, dir);
                    verdicts.push(Verdict {
                        name: "direction".into(),
                        passed: angle <= 5.0,
                        detail: format!(
                            "final maximizer {angle:.2}° from the steering direction \
                             (tolerance 5°)"
                        ),
                    });
                }
            }
        }
        RadiusLaw::LogEscape => {
            verdicts.push(monotone_verdict(&times, &radii, &in_window, h_fine));
        }
        RadiusLaw::Implicit | RadiusLaw::PowerTail { .. } | RadiusLaw::PowerLogTail { .. } => {
            if log_family {
                // Log-corrected constants need more decades than a desk
                // run affords; only the trend is checked.
                verdicts.push(monotone_verdict(&times, &radii, &in_window, h_fine));
            } else {
                let mut worst = 0.0f64;
                let mut used = 0;
                for &i in &in_window {
                    if let Some(p) = predicted[i] {
                        if p > 0.0 {
                            worst = worst.max((radii[i] - p).abs() / p);
                            used += 1;
                        }
                    }
                }
                verdicts.push(Verdict {
                    name: "implicit-gap".into(),
                    passed: used > 0 && worst <= 0.10,
                    detail: format!(
                        "max relative gap {worst:.3e} over {used} window records \
                         (tolerance 0.10)"
                    ),
                });
            }
        }
        RadiusLaw::Bounded { radius } => {
            // The transient decays like a power of t, so judge confinement over
            // the final decade of records rather than the whole fit window.
            let tol = 0.02 * radius.abs() + 2.0 * h_fine;
            let t_settle = t_end / 10.0;
            let mut d_lim = 0.0f64;
            let mut used = 0usize;
            for i in 0..times.len() {
                if times[i] >= t_settle {
                    d_lim = d_lim.max((radii[i] - radius).abs());
                    used += 1;
                }
            }
            verdicts.push(Verdict {
                name: "limit-radius".into(),
                passed: used > 0 && d_lim <= tol,
                detail: format!(
                    "max |radius − {radius:.5}| = {d_lim:.2e} over the final \
                     decade ({used} records, tolerance {tol:.2e})"
                ),
            });
            if let Some(limit) = &pred.limit_point {
                let last = traj.records.last().unwrap();
                if let Some(x) = last.maximizers.first() {
                    let dist = dist(x, limit);
                    verdicts.push(Verdict {
                        name: "limit-point".into(),
                        passed: dist <= tol,
                        detail: format!(
                            "final maximizer {dist:.2e} from the predicted limit \
                             (tolerance {tol:.2e})"
                        ),
                    });
                }
            }
        }
        RadiusLaw::Origin => {
            let first_w = in_window.first().map(|&i| radii[i]).unwrap_or(0.0);
            let last_r = *radii.last().unwrap();
            let passed = last_r <= (0.5 * first_w).max(2.0 * h_fine);
            verdicts.push(Verdict {
                name: "collapse-trend".into(),
                passed,
                detail: format!(
                    "final radius {last_r:.3e} vs window start {first_w:.3e} \
                     (must at least halve or reach the origin cells)"
                ),
            });
        }
    }

    if pred.uniqueness_expected {
        let mut bad = None;
        for &i in &in_window {
            let rec = &traj.records[i];
            let definite = rec
                .curvature
                .first()
                .map(|c| *c == CurvatureFlag::NegativeDefinite)
                .unwrap_or(false);
            if rec.multiplicity != 1 || !definite {
                bad = Some(format!(
                    "t = {:.4e}: multiplicity {}, curvature {:?}",
                    rec.t,
                    rec.multiplicity,
                    rec.curvature.first()
                ));
                break;
            }
        }
        verdicts.push(Verdict {
            name: "uniqueness".into(),
            passed: bad.is_none(),
            detail: bad.unwrap_or_else(|| {
                format!(
                    "multiplicity 1 with negative-definite curvature at all {} window \
                     records",
                    in_window.len()
                )
            }),
        });
    }

    Ok(AnalysisOut {
        fit: Some(fit),
        verdicts,
        predicted,
        window,
        max_drift_k0,
    })
}

fn monotone_verdict(
    times: &[f64],
    radii: &[f64],
    in_window: &[usize],
    h_fine: f64,
) -> Verdict {
    let mut bad = None;
    for w in in_window.windows(2) {
        let (i, j) = (w[0], w[1]);
        if radii[j] < radii[i] - h_fine {
            bad = Some(format!(
                "radius fell from {:.4e} to {:.4e} between t = {:.3e} and {:.3e}",
                radii[i], radii[j], times[i], times[j]
            ));
            break;
        }
    }
    Verdict {
        name: "monotone-escape".into(),
        passed: bad.is_none(),
        detail: bad.unwrap_or_else(|| {
            format!(
                "radius nondecreasing across {} window records (log-corrected rate \
                 constants are not asserted at this time span)",
                in_window.len()
            )
        }),
    }
}

fn angle_deg(a: &[f64], b: &[f64]) -> f64 {
    let na = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nb = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (dot / (na * nb)).clamp(-1.0, 1.0).acos().to_degrees()
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

// ---------------------------------------------------------------------------
// report writers
// ---------------------------------------------------------------------------

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("report serialization");
    s.push('\n');
    s
}

fn trajectory_csv(
    traj: &HotSpotTrajectory,
    prediction: Option<&Prediction>,
    analysis: &AnalysisOut,
    n: u32,
) -> String {
    let mut out = String::new();
    out.push('t');
    for i in 1..=n {
        out.push_str(&format!(",x{i}"));
    }
    out.push_str(",radius,max_value,multiplicity,curvature");
    out.push_str(",predicted_radius");
    for i in 1..=n {
        out.push_str(&format!(",pred_dir{i}"));
    }
    out.push_str(",radial_error,angular_error_deg\n");

    let dir = prediction.and_then(|p| p.direction.clone());
    let radii = traj.radii();
    for (i, rec) in traj.records.iter().enumerate() {
        out.push_str(&csv_f(rec.t));
        let x = rec.maximizers.first().cloned().unwrap_or_else(|| vec![0.0; n as usize]);
        for v in &x {
            out.push(',');
            out.push_str(&csv_f(*v));
        }
        out.push(',');
        out.push_str(&csv_f(radii[i]));
        out.push(',');
        out.push_str(&csv_f(rec.max_value));
        out.push_str(&format!(",{}", rec.multiplicity));
        let flag = match rec.curvature.first() {
            Some(CurvatureFlag::NegativeDefinite) => "neg_definite",
            Some(CurvatureFlag::Indeterminate) => "indeterminate",
            Some(CurvatureFlag::Indefinite) => "indefinite",
            None => "none",
        };
        out.push_str(&format!(",{flag}"));
        match analysis.predicted[i] {
            Some(p) => {
                out.push(',');
                out.push_str(&csv_f(p));
            }
            None => out.push(','),
        }
        match &dir {
            Some(d) => {
                for v in d {
                    out.push(',');
                    out.push_str(&csv_f(*v));
                }
            }
            None => {
                for _ in 0..n {
                    out.push(',');
                }
            }
        }
        match analysis.predicted[i] {
            Some(p) => {
                out.push(',');
                out.push_str(&csv_f(radii[i] - p));
            }
            None => out.push(','),
        }
        let angle = match (&dir, radii[i]) {
            (Some(d), r) if r > 1e-9 => Some(angle_deg(&x, d)),
            _ => None,
        };
        match angle {
            Some(a) => {
                out.push(',');
                out.push_str(&csv_f(a));
            }
            None => out.push(','),
        }
        out.push('\n');
    }
    out
}

fn conservation_csv(evolutions: &[ModeEvolution]) -> String {
    let mut out = String::from("k,idx,t,pairing,relative_drift\n");
    for ev in evolutions {
        let p0 = ev.pairing[0];
        let scale = ev.pairing.iter().fold(0.0f64, |m, &p| m.max(p.abs()));
        let denom = if p0.abs() > 1e-12 * scale.max(1e-300) {
            p0.abs()
        } else {
            scale.max(1e-300)
        };
        for (i, &t) in ev.times.iter().enumerate() {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                ev.k,
                ev.idx,
                csv_f(t),
                csv_f(ev.pairing[i]),
                csv_f((ev.pairing[i] - p0).abs() / denom)
            ));
        }
    }
    out
}

fn profile_csv(p: &HarmonicProfile) -> String {
    let mut out = String::from("r,u,u_prime\n");
    for i in 0..p.grid.len() {
        out.push_str(&format!(
            "{},{},{}\n",
            csv_f(p.grid.r[i]),
            csv_f(p.u_values[i]),
            csv_f(p.u_prime[i])
        ));
    }
    out
}

#[allow(clippy::too_many_arguments)]
fn comparison_json(
    prep: &Prepared,
    class: &Option<OperatorClass>,
    prediction: Option<&Prediction>,
    traj: &HotSpotTrajectory,
    analysis: &AnalysisOut,
    seed: u64,
    h_fine: f64,
) -> Value {
    let radii = traj.radii();
    let records: Vec<Value> = traj
        .records
        .iter()
        .enumerate()
        .map(|(i, rec)| {
            let rel_gap = analysis.predicted[i].and_then(|p| {
                if p > 0.0 {
                    Some((radii[i] - p).abs() / p)
                } else {
                    None
                }
            });
            json!({
                "t": rec.t,
                "radius": radii[i],
                "maximizer": rec.maximizers.first(),
                "max_value": finite_or_null(rec.max_value),
                "multiplicity": rec.multiplicity,
                "predicted_radius": analysis.predicted[i],
                "rel_gap": rel_gap,
            })
        })
        .collect();
    let verdicts: Vec<Value> = analysis
        .verdicts
        .iter()
        .map(|v| json!({"name": v.name, "passed": v.passed, "detail": v.detail}))
        .collect();
    let fit_json = analysis.fit.as_ref().map(|f| {
        json!({
            "model": format!("{:?}", f.model),
            "exponent": f.exponent,
            "coefficient": f.coefficient,
            "residual_rms": f.residual_rms,
            "window": [f.window.0, f.window.1],
            "used": f.used,
        })
    });
    json!({
        "name": prep.loaded.scenario.name,
        "dimension": prep.spec.dimension,
        "seed": seed,
        "class": class.as_ref().map(class_json),
        "prediction": prediction.map(prediction_json),
        "fit": fit_json,
        "fit_window": [analysis.window.0, analysis.window.1],
        "conservation": {
            "max_rel_drift_k0": analysis.max_drift_k0,
            "tolerance": 1e-3,
        },
        "decomposition": decomposition_json(&prep.decomp),
        "grid": {
            "cells": prep.loaded.scenario.evolution.grid_cells,
            "h_fine": h_fine,
            "r_dom": prep.loaded.domain_radius(),
        },
        "records": records,
        "verdicts": verdicts,
    })
}

fn summary_text(
    prep: &Prepared,
    class: &Option<OperatorClass>,
    prediction: Option<&Prediction>,
    traj: &HotSpotTrajectory,
    analysis: &AnalysisOut,
    out_dir: &Path,
) -> String {
    let scn = &prep.loaded.scenario;
    let mut s = String::new();
    s.push_str(&format!(
        "scenario {} (N = {}, potential {})\n",
        scn.name, scn.dimension, scn.potential.family
    ));
    s.push_str(&format!(
        "endpoint coefficients: lambda1 = {:.6}, lambda2 = {:.6}\n",
        prep.spec.lambda1, prep.spec.lambda2
    ));
    match class {
        Some(c) => s.push_str(&format!(
            "tail class: {} (A = {:.6}, c = {:.6}{})\n",
            c.tag,
            c.a_exponent,
            c.c_constant,
            if c.log_corrected { ", log-corrected" } else { "" }
        )),
        None => s.push_str("tail class: skipped (prediction disabled)\n"),
    }
    if let Some(p) = prediction {
        s.push_str(&format!("case {} — {}\n", p.case_label, p.case_description));
        s.push_str(&format!("predicted law: {}\n", p.radius_law.describe()));
        for (name, law) in &p.alternate_laws {
            s.push_str(&format!("  alternate ({name}): {}\n", law.describe()));
        }
        if let Some(d) = &p.direction {
            s.push_str(&format!(
                "steering direction: ({})\n",
                d.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(", ")
            ));
        }
        if let Some(lp) = &p.limit_point {
            s.push_str(&format!(
                "predicted limit point: ({})\n",
                lp.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(", ")
            ));
        }
        s.push_str(&format!(
            "uniqueness expected: {} — {}\n",
            p.uniqueness_expected, p.uniqueness_basis
        ));
    }
    if let Some(f) = &analysis.fit {
        s.push_str(&format!(
            "fitted ({:?}): exponent {:.5}, coefficient {:.5}, rms {:.2e} over \
             t ∈ [{:.4e}, {:.4e}] ({} records)\n",
            f.model, f.exponent, f.coefficient, f.residual_rms, f.window.0, f.window.1,
            f.used
        ));
    }
    let times = traj.times();
    s.push_str(&format!(
        "records: {} over t ∈ [{:.4e}, {:.4e}]; fit window [{:.4e}, {:.4e}]\n",
        times.len(),
        times.first().unwrap(),
        times.last().unwrap(),
        analysis.window.0,
        analysis.window.1
    ));
    if let Some(rec) = traj.records.last() {
        if let Some(x) = rec.maximizers.first() {
            s.push_str(&format!(
                "final hot spot: ({}) at t = {:.4e}, value {:.6e}, multiplicity {}\n",
                x.iter().map(|v| format!("{v:.5}")).collect::<Vec<_>>().join(", "),
                rec.t,
                rec.max_value,
                rec.multiplicity
            ));
        }
    }
    s.push_str("verdicts:\n");
    for v in &analysis.verdicts {
        s.push_str(&format!(
            "  {} {}: {}\n",
            if v.passed { "PASS" } else { "FAIL" },
            v.name,
            v.detail
        ));
    }
    s.push_str(&format!("outputs: {}\n", out_dir.display()));
    s
}
