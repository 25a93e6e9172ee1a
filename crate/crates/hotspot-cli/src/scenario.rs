//! Scenario files: the single structured config that drives every run.
//!
//! A scenario names the dimension, the potential, the initial data (a
//! formula over x1..xN and r, or an explicit mode list), the evolution
//! window, the analysis knobs, and where outputs land. Parsing failures
//! (bad TOML, unknown or missing keys) are reported with the offending
//! key; semantic failures (values out of range, inconsistent choices) are
//! a separate validation stage so the two exit codes stay distinct.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use hotspot_core::potential::{ConditionReport, PotentialSpec};

use crate::expr::Expr;

/// Top-level scenario file.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub dimension: u32,
    pub potential: PotentialConfig,
    pub initial_data: InitialDataConfig,
    #[serde(default)]
    pub evolution: EvolutionConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub outputs: OutputConfig,
}

/// Inline potential description.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    /// One of `zero`, `hardy`, `lorentz`, `decaying`, `tabulated`.
    pub family: String,
    /// hardy: the inverse-square coefficient λ.
    pub lambda: Option<f64>,
    /// lorentz: the tail coefficient λ₂ in λ₂/(1+r²).
    pub lambda2: Option<f64>,
    /// decaying: the amplitude μ in μ(1+r²)^{−d/2}.
    pub mu: Option<f64>,
    /// decaying: the decay power d.
    pub power: Option<f64>,
    /// tabulated: path to a two-column (r, V) TSV, relative to the config.
    pub table: Option<String>,
    /// tabulated: declared endpoint coefficients and approach rate.
    pub origin_coefficient: Option<f64>,
    pub tail_coefficient: Option<f64>,
    pub theta: Option<f64>,
}

/// Initial data: exactly one of `expression` or `modes`.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialDataConfig {
    /// Formula for φ(x) over x1..xN and r.
    pub expression: Option<String>,
    /// Radius beyond which φ is numerically zero.
    #[serde(default = "default_support_radius")]
    pub support_radius: f64,
    /// Spherical-harmonic degrees kept: k < max_degree.
    #[serde(default = "default_max_degree")]
    pub max_degree: u32,
    /// Explicit mode list (radial formulas over r only).
    #[serde(default)]
    pub modes: Vec<ModeConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeConfig {
    pub k: u32,
    #[serde(default)]
    pub index: usize,
    /// Radial coefficient formula, a function of r.
    pub radial: String,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionConfig {
    pub t_end: f64,
    /// Number of geometrically spaced record times.
    #[serde(default = "default_records")]
    pub records: usize,
    /// First record time; default t_end/400.
    pub t_start: Option<f64>,
    #[serde(default = "default_grid_cells")]
    pub grid_cells: usize,
    /// Outer radius = max(20, domain_factor·√t_end).
    #[serde(default = "default_domain_factor")]
    pub domain_factor: f64,
    /// Time-step growth fraction (dt ≤ dt_frac·t).
    #[serde(default = "default_dt_frac")]
    pub dt_frac: f64,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            t_end: 100.0,
            records: default_records(),
            t_start: None,
            grid_cells: default_grid_cells(),
            domain_factor: default_domain_factor(),
            dt_frac: default_dt_frac(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Length of the trailing fit window, in decades of t.
    #[serde(default = "default_fit_decades")]
    pub fit_decades: f64,
    /// Lattice nodes per axis for the maximizer scan.
    #[serde(default = "default_scan_points")]
    pub scan_points: usize,
    /// Whether to classify and compare against the predicted law.
    #[serde(default = "default_true")]
    pub predict: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            fit_decades: default_fit_decades(),
            scan_points: default_scan_points(),
            predict: true,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory, relative to the working directory (or --out).
    pub directory: Option<String>,
    #[serde(default = "default_formats")]
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: None,
            formats: default_formats(),
        }
    }
}

fn default_support_radius() -> f64 {
    40.0
}
fn default_max_degree() -> u32 {
    5
}
fn default_records() -> usize {
    24
}
fn default_grid_cells() -> usize {
    4096
}
fn default_domain_factor() -> f64 {
    8.0
}
fn default_dt_frac() -> f64 {
    0.05
}
fn default_fit_decades() -> f64 {
    1.5
}
fn default_scan_points() -> usize {
    256
}
fn default_true() -> bool {
    true
}
fn default_formats() -> Vec<String> {
    vec!["csv".into(), "json".into()]
}

/// Stage-tagged scenario errors. Parse failures exit with 2, validation
/// failures with 3.
#[derive(Debug)]
pub enum ScenarioError {
    /// Unreadable file or malformed TOML/schema; message names the key.
    Parse(String),
    /// Well-formed config with out-of-range or inconsistent values.
    Validation(String),
}

impl std::fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ScenarioError::Parse(msg) => write!(f, "config parse error: {msg}"),
            ScenarioError::Validation(msg) => write!(f, "config validation error: {msg}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

/// Parsed initial data ready for decomposition.
pub enum InitialData {
    /// φ as a point function.
    Expression(Expr),
    /// Explicit (k, index, radial formula) triples.
    Modes(Vec<(u32, usize, Expr)>),
}

/// A scenario bound to its config location (for resolving table paths).
#[derive(Debug)]
pub struct LoadedScenario {
    pub scenario: Scenario,
    pub config_dir: PathBuf,
}

/// Read and parse a scenario file (exit-2 class errors only).
pub fn load_scenario(path: &Path) -> Result<LoadedScenario, ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ScenarioError::Parse(format!("cannot read {}: {e}", path.display()))
    })?;
    let scenario: Scenario =
        toml::from_str(&text).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    let config_dir = path
        .parent()
        .map(|p| p.to_path_buf())
        .unwrap_or_else(|| PathBuf::from("."));
    Ok(LoadedScenario {
        scenario,
        config_dir,
    })
}

impl LoadedScenario {
    /// Semantic validation (exit-3 class): ranges, exclusivity, formats.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let s = &self.scenario;
        let err = |msg: String| Err(ScenarioError::Validation(msg));
        if s.name.is_empty() {
            return err("`name` must be nonempty".into());
        }
        if !(2..=8).contains(&s.dimension) {
            return err(format!("`dimension` must be in 2..=8, got {}", s.dimension));
        }
        for f in &s.outputs.formats {
            if f != "csv" && f != "json" {
                return err(format!(
                    "`outputs.formats` entries must be \"csv\" or \"json\", got \"{f}\""
                ));
            }
        }
        let has_expr = s.initial_data.expression.is_some();
        let has_modes = !s.initial_data.modes.is_empty();
        if has_expr == has_modes {
            return err(
                "`initial_data` needs exactly one of `expression` or `modes`".into(),
            );
        }
        if has_expr && s.dimension > 3 {
            return err(format!(
                "`initial_data.expression` needs dimension 2 or 3 (sphere quadrature); \
                 dimension {} data must use `initial_data.modes`",
                s.dimension
            ));
        }
        if s.initial_data.support_radius <= 0.0 {
            return err("`initial_data.support_radius` must be positive".into());
        }
        // Harmonic tables: N = 2 supports high degrees, N = 3 through
        // degree 4; other dimensions carry only the k ≤ 1 families every
        // dimension shares.
        let k_cap: u32 = match s.dimension {
            2 => 31,
            3 => 4,
            _ => 1,
        };
        if has_expr {
            if s.initial_data.max_degree < 2 {
                return err("`initial_data.max_degree` must be at least 2".into());
            }
            if s.initial_data.max_degree > k_cap + 1 {
                return err(format!(
                    "`initial_data.max_degree` must be at most {} in dimension {}",
                    k_cap + 1,
                    s.dimension
                ));
            }
        }
        for (row, m) in s.initial_data.modes.iter().enumerate() {
            if m.k > k_cap {
                return err(format!(
                    "`initial_data.modes[{row}].k` = {} exceeds the degree cap {} \
                     for dimension {}",
                    m.k, k_cap, s.dimension
                ));
            }
        }
        let ev = &s.evolution;
        if !(ev.t_end > 0.0) {
            return err("`evolution.t_end` must be positive".into());
        }
        if s.analysis.predict {
            if ev.t_end <= 1.0 {
                return err(format!(
                    "`evolution.t_end` must exceed 1 when rate fitting is enabled, \
                     got {}",
                    ev.t_end
                ));
            }
            if ev.records < 8 {
                return err(format!(
                    "`evolution.records` must be at least 8 when rate fitting is \
                     enabled, got {}",
                    ev.records
                ));
            }
        }
        if ev.records < 2 {
            return err("`evolution.records` must be at least 2".into());
        }
        if let Some(t0) = ev.t_start {
            if !(t0 > 0.0 && t0 < ev.t_end) {
                return err(format!(
                    "`evolution.t_start` must lie in (0, t_end), got {t0}"
                ));
            }
        }
        if ev.grid_cells < 64 {
            return err("`evolution.grid_cells` must be at least 64".into());
        }
        if !(ev.domain_factor >= 1.0) {
            return err("`evolution.domain_factor` must be at least 1".into());
        }
        if !(ev.dt_frac > 0.0 && ev.dt_frac <= 0.5) {
            return err("`evolution.dt_frac` must lie in (0, 0.5]".into());
        }
        if !(s.analysis.fit_decades > 0.0) {
            return err("`analysis.fit_decades` must be positive".into());
        }
        if s.analysis.scan_points < 16 {
            return err("`analysis.scan_points` must be at least 16".into());
        }
        // Family-specific parameter presence.
        match s.potential.family.as_str() {
            "zero" => {}
            "hardy" => {
                if s.potential.lambda.is_none() {
                    return err("`potential.lambda` is required for family \"hardy\"".into());
                }
            }
            "lorentz" => {
                if s.potential.lambda2.is_none() {
                    return err(
                        "`potential.lambda2` is required for family \"lorentz\"".into()
                    );
                }
            }
            "decaying" => {
                if s.potential.mu.is_none() || s.potential.power.is_none() {
                    return err(
                        "`potential.mu` and `potential.power` are required for family \
                         \"decaying\""
                            .into(),
                    );
                }
            }
            "tabulated" => {
                if s.potential.table.is_none() {
                    return err(
                        "`potential.table` is required for family \"tabulated\"".into()
                    );
                }
            }
            other => {
                return err(format!(
                    "`potential.family` must be one of zero|hardy|lorentz|decaying|\
                     tabulated, got \"{other}\""
                ));
            }
        }
        Ok(())
    }

    /// Build the potential from the config (validation-class errors).
    pub fn build_potential(&self) -> Result<PotentialSpec, ScenarioError> {
        let s = &self.scenario;
        let p = &s.potential;
        let n = s.dimension;
        let wrap = |e: hotspot_core::potential::PotentialError| {
            ScenarioError::Validation(format!("`potential`: {e}"))
        };
        match p.family.as_str() {
            "zero" => Ok(PotentialSpec::zero(n)),
            "hardy" => PotentialSpec::hardy(n, p.lambda.unwrap()).map_err(wrap),
            "lorentz" => PotentialSpec::lorentz(n, p.lambda2.unwrap()).map_err(wrap),
            "decaying" => {
                PotentialSpec::decaying(n, p.mu.unwrap(), p.power.unwrap()).map_err(wrap)
            }
            "tabulated" => {
                let rel = p.table.as_ref().unwrap();
                let path = self.config_dir.join(rel);
                let (radii, values) = read_table(&path)?;
                PotentialSpec::tabulated(
                    n,
                    radii,
                    values,
                    p.origin_coefficient.unwrap_or(0.0),
                    p.tail_coefficient.unwrap_or(0.0),
                    p.theta.unwrap_or(1.0),
                )
                .map_err(wrap)
            }
            _ => unreachable!("validate() screens the family name"),
        }
    }

    /// Parse the initial data formulas (validation-class errors).
    pub fn build_initial_data(&self) -> Result<InitialData, ScenarioError> {
        let s = &self.scenario;
        if let Some(src) = &s.initial_data.expression {
            let expr = Expr::parse(src, s.dimension).map_err(|e| {
                ScenarioError::Validation(format!("`initial_data.expression` {e}"))
            })?;
            return Ok(InitialData::Expression(expr));
        }
        let mut modes = Vec::with_capacity(s.initial_data.modes.len());
        for (row, m) in s.initial_data.modes.iter().enumerate() {
            let expr = Expr::parse(&m.radial, s.dimension).map_err(|e| {
                ScenarioError::Validation(format!(
                    "`initial_data.modes[{row}].radial` {e}"
                ))
            })?;
            if !expr.is_radial {
                return Err(ScenarioError::Validation(format!(
                    "`initial_data.modes[{row}].radial` must be a function of r only"
                )));
            }
            modes.push((m.k, m.index, expr));
        }
        Ok(InitialData::Modes(modes))
    }

    /// Geometric record schedule from t_start to t_end.
    pub fn record_times(&self) -> Vec<f64> {
        let ev = &self.scenario.evolution;
        let t_end = ev.t_end;
        let t0 = ev.t_start.unwrap_or(t_end / 400.0);
        let m = ev.records.max(2);
        let ratio = (t_end / t0).powf(1.0 / (m - 1) as f64);
        let mut ts: Vec<f64> = (0..m).map(|j| t0 * ratio.powi(j as i32)).collect();
        *ts.last_mut().unwrap() = t_end;
        ts
    }

    /// Outer domain radius for the evolution.
    pub fn domain_radius(&self) -> f64 {
        let ev = &self.scenario.evolution;
        (ev.domain_factor * ev.t_end.sqrt()).max(20.0)
    }

    /// Summarize a potential-contract report into a validation error.
    pub fn contract_failure(&self, report: &ConditionReport) -> ScenarioError {
        let detail = report
            .checks
            .iter()
            .find(|c| !c.passed)
            .map(|c| {
                let at = c
                    .witness_r
                    .map(|r| format!(" at r = {r:.4e}"))
                    .unwrap_or_default();
                format!("{}{}: {}", c.name, at, c.detail)
            })
            .unwrap_or_else(|| "unspecified sub-check".into());
        ScenarioError::Validation(format!(
            "`potential` fails the endpoint contract — {detail}"
        ))
    }
}

/// Two-column whitespace-separated (r, V) table. Lines starting with `#`
/// are comments.
fn read_table(path: &Path) -> Result<(Vec<f64>, Vec<f64>), ScenarioError> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        ScenarioError::Validation(format!(
            "`potential.table`: cannot read {}: {e}",
            path.display()
        ))
    })?;
    let mut radii = Vec::new();
    let mut values = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split_whitespace();
        let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
            return Err(ScenarioError::Validation(format!(
                "`potential.table`: line {} needs two columns",
                lineno + 1
            )));
        };
        let r: f64 = a.parse().map_err(|_| {
            ScenarioError::Validation(format!(
                "`potential.table`: bad radius `{a}` on line {}",
                lineno + 1
            ))
        })?;
        let v: f64 = b.parse().map_err(|_| {
            ScenarioError::Validation(format!(
                "`potential.table`: bad value `{b}` on line {}",
                lineno + 1
            ))
        })?;
        radii.push(r);
        values.push(v);
    }
    Ok((radii, values))
}
