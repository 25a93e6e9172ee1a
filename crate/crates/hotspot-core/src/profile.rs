//! Harmonic profiles U_k of the radial operator −Δ + V on mode k, their
//! tail classification, and the functional calculus built on them.
//!
//! U_k solves the singular ODE
//!
//! U″ + (N−1)/r · U′ − V_k(r) U = 0,   V_k = V + ω_k/r²,
//!
//! normalized so r^{−a} U_k(r) → 1 as r → 0 with a = A+(λ₁+ω_k). The solver
//! starts from a two-term Frobenius series at r₀ = 1e-6 and integrates
//! outward with an adaptive Dormand–Prince 5(4) scheme, tabulating U and U′
//! on the standard radial grid through dense output.
//!
//! On top of the profiles live the quantities that decide where hot spots
//! go: the drift functional F_k, the perturbation integrals Γ_k and the
//! total mass Λ, the maximizer set Π of U₀, and the score S(r) whose
//! maximizer locates bounded hot-spot limits.

use crate::grid::RadialGrid;
use crate::potential::{
    angular_eigenvalue, characteristic_exponents, lambda_star, PotentialFamily, PotentialSpec,
};
use crate::quad::{cumulative, HeadRule};

/// A tabulated mode profile U_k with its origin/tail exponents.
#[derive(Debug, Clone)]
pub struct HarmonicProfile {
    /// Spherical-harmonic degree k ≥ 0.
    pub k: u32,
    /// Space dimension N ≥ 2.
    pub dimension: u32,
    /// Radial grid (geometric core, uniform tail).
    pub grid: RadialGrid,
    /// U_k at the grid nodes; strictly positive.
    pub u_values: Vec<f64>,
    /// U_k′ at the grid nodes (from the integrator state, not differenced).
    pub u_prime: Vec<f64>,
    /// Origin exponent a = A+(λ₁+ω_k); the normalization is r^{−a}U_k → 1.
    pub a_plus_origin: f64,
    /// Fitted tail exponent over the last decade.
    pub a_infinity: f64,
    /// Fitted tail constant: U_k ≈ c · r^{a_infinity} (times log(2+r) when
    /// `log_corrected`).
    pub c_infinity: f64,
    /// True when the power·log tail model fit better than the pure power.
    pub log_corrected: bool,
}

/// Tail class of the k = 0 operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassTag {
    /// Subcritical tail: U₀ → c r^{A+(λ₂)} with A+ simple.
    S,
    /// Threshold tail with logarithmic correction: U₀ ~ c r^{A} log r.
    SStar,
    /// Critical tail: U₀ ~ c r^{A−(λ₂)}.
    C,
}

impl std::fmt::Display for ClassTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassTag::S => write!(f, "subcritical"),
            ClassTag::SStar => write!(f, "threshold-log"),
            ClassTag::C => write!(f, "critical"),
        }
    }
}

/// Classification verdict with the fitted tail data and fit evidence.
#[derive(Debug, Clone)]
pub struct OperatorClass {
    pub tag: ClassTag,
    /// The exponent the winning model fixes: A+ for S/S*, A− for C.
    pub a_exponent: f64,
    /// Fitted multiplicative constant of the winning tail model.
    pub c_constant: f64,
    /// (model name, rms residual of log U against the model) per candidate.
    pub evidence: Vec<(String, f64)>,
    pub log_corrected: bool,
}

/// Γ_k table with its normalized limit and the identity deviation.
#[derive(Debug, Clone)]
pub struct GammaFunctional {
    pub k: u32,
    /// Γ_k(r) at the profile grid nodes.
    pub values: Vec<f64>,
    /// Γ_k(r)/r^k at the nodes (the quantity with a finite limit).
    pub normalized: Vec<f64>,
    /// lim_{r→∞} Γ_k(r)/r^k when the tail converges.
    pub limit: Option<f64>,
    /// Last-decade samples (r, Γ_k/r^k) — diagnostic for divergence.
    pub partial_sums: Vec<(f64, f64)>,
    /// max over [1, r_max] of the relative deviation in the reconstruction
    /// identity U_k = r^k + Γ_k (λ₁ = 0) or U_k = Γ_k (λ₁ > 0).
    pub identity_dev: f64,
}

impl GammaFunctional {
    /// The finite limit, or a divergence error carrying the partial sums.
    pub fn gamma_infinity(&self) -> Result<f64, ProfileError> {
        self.limit.ok_or_else(|| ProfileError::DivergentGamma {
            partial_sums: self.partial_sums.clone(),
        })
    }
}

/// Maximizer set Π of U₀ over [0, ∞), as seen on the grid.
#[derive(Debug, Clone)]
pub struct PiSummary {
    /// sup U₀ over the grid.
    pub max_u: f64,
    /// Refined maximizer radii, ascending. A plateau reports the single
    /// radius 0 with `is_plateau` set.
    pub maximizers: Vec<f64>,
    /// min Π when the set is nonempty.
    pub min_pi: Option<f64>,
    /// True when the supremum is only approached as r → ∞ (Π empty).
    pub is_empty: bool,
    /// True when U₀ is flat to 1e-10 relative — Π is all of [0, ∞).
    pub is_plateau: bool,
}

/// Score table S(r) and its maximizer over Π.
#[derive(Debug, Clone)]
pub struct STable {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// argmax of S over Π (None when Π is empty).
    pub maximizer: Option<f64>,
    pub s_at_maximizer: f64,
}

/// Errors from the profile solver and the functional calculus.
#[derive(Debug, Clone)]
pub enum ProfileError {
    /// U_k hit zero at radius r — the mode leaves the positive regime.
    ProfileVanishes { r: f64 },
    /// Step size collapsed at radius r (stiffness or non-smooth data).
    StiffnessFailure { r: f64, h: f64 },
    /// Tail-model residuals too close to call; carries (model, rms) pairs.
    AmbiguousClass { evidence: Vec<(String, f64)> },
    /// Γ_k/r^k failed to converge; carries last-decade partial sums.
    DivergentGamma { partial_sums: Vec<(f64, f64)> },
    /// Total-mass integral diverges: needs tail decay d > N.
    TailDivergence { d: f64, n: u32 },
    /// The requested functional is not defined in this regime.
    Unsupported(String),
}

impl std::fmt::Display for ProfileError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ProfileError::ProfileVanishes { r } => {
                write!(f, "profile hit zero at r = {r:.6e}")
            }
            ProfileError::StiffnessFailure { r, h } => {
                write!(f, "step size collapsed to {h:.3e} at r = {r:.6e}")
            }
            ProfileError::AmbiguousClass { evidence } => {
                write!(f, "tail classification ambiguous:")?;
                for (m, res) in evidence {
                    write!(f, " [{m}: rms {res:.3e}]")?;
                }
                Ok(())
            }
            ProfileError::DivergentGamma { partial_sums } => {
                write!(f, "perturbation integral diverges; last partial sums:")?;
                for (r, g) in partial_sums.iter().rev().take(3) {
                    write!(f, " ({r:.3e}, {g:.6e})")?;
                }
                Ok(())
            }
            ProfileError::TailDivergence { d, n } => write!(
                f,
                "total-mass integral diverges: tail decay d = {d} must exceed N = {n}"
            ),
            ProfileError::Unsupported(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for ProfileError {}

// ---------------------------------------------------------------------------
// Dormand–Prince 5(4) with dense output
// ---------------------------------------------------------------------------

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A2: [f64; 1] = [0.2];
const A3: [f64; 2] = [3.0 / 40.0, 9.0 / 40.0];
const A4: [f64; 3] = [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0];
const A5: [f64; 4] = [
    19372.0 / 6561.0,
    -25360.0 / 2187.0,
    64448.0 / 6561.0,
    -212.0 / 729.0,
];
const A6: [f64; 5] = [
    9017.0 / 3168.0,
    -355.0 / 33.0,
    46732.0 / 5247.0,
    49.0 / 176.0,
    -5103.0 / 18656.0,
];
const A7: [f64; 6] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
];
/// Error coefficients e_i = b5_i − b4_i.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
/// Dense-output quartic coefficients (the standard continuous extension).
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

type State = [f64; 2];

#[inline]
fn axpyn(y: &State, h: f64, coeffs: &[f64], ks: &[State]) -> State {
    let mut out = *y;
    for (c, k) in coeffs.iter().zip(ks) {
        out[0] += h * c * k[0];
        out[1] += h * c * k[1];
    }
    out
}

/// One accepted step's dense-output data: evaluate the solution anywhere in
/// [r, r+h] to fifth order.
struct DenseSegment {
    r: f64,
    h: f64,
    rcont: [[f64; 2]; 5],
}

impl DenseSegment {
    fn build(r: f64, h: f64, y0: &State, y1: &State, ks: &[State; 7]) -> Self {
        let mut rcont = [[0.0; 2]; 5];
        for i in 0..2 {
            let dy = y1[i] - y0[i];
            rcont[0][i] = y0[i];
            rcont[1][i] = dy;
            rcont[2][i] = h * ks[0][i] - dy;
            rcont[3][i] = dy - h * ks[6][i] - rcont[2][i];
            let mut acc = 0.0;
            for j in 0..7 {
                acc += D[j] * ks[j][i];
            }
            rcont[4][i] = h * acc;
        }
        DenseSegment { r, h, rcont }
    }

    fn eval(&self, x: f64) -> State {
        let th = (x - self.r) / self.h;
        let th1 = 1.0 - th;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = self.rcont[0][i]
                + th * (self.rcont[1][i]
                    + th1 * (self.rcont[2][i]
                        + th * (self.rcont[3][i] + th1 * self.rcont[4][i])));
        }
        out
    }
}

/// Solve the mode-k profile ODE on the standard grid up to r_max.
///
/// Starts from the two-term series U = r^a (1 + c₂ r²) at the innermost
/// node, with a = A+(λ₁+ω_k) and c₂ = W(r₀) / (2(2a+N)) built from the
/// origin remainder W = V − λ₁/r². Relative tolerance is 1e-10 inside r < 1
/// and 1e-8 beyond.
pub fn solve_profile(
    spec: &PotentialSpec,
    k: u32,
    r_max: f64,
) -> Result<HarmonicProfile, ProfileError> {
    assert!(r_max >= 10.0, "profile grid needs at least one tail decade");
    let n = spec.dimension;
    let nf = n as f64;
    let omega = angular_eigenvalue(n, k);
    let a = characteristic_exponents(n, spec.lambda1 + omega)
        .expect("lambda1 + omega_k stays above the Hardy threshold")
        .a_plus;

    let grid = RadialGrid::profile_default(r_max);
    let nodes = &grid.r;
    let r0 = nodes[0];

    // Frobenius seed: the r² correction driven by the origin remainder.
    let w0 = spec.origin_remainder(r0);
    let c2 = w0 / (2.0 * (2.0 * a + nf));
    let seed_u = r0.powf(a) * (1.0 + c2 * r0 * r0);
    let seed_up = r0.powf(a - 1.0) * (a + (a + 2.0) * c2 * r0 * r0);

    let rhs = |r: f64, y: &State| -> State {
        [y[1], -(nf - 1.0) / r * y[1] + spec.v_k(k, r) * y[0]]
    };

    let mut u_values = Vec::with_capacity(nodes.len());
    let mut u_prime = Vec::with_capacity(nodes.len());
    u_values.push(seed_u);
    u_prime.push(seed_up);
    let mut next_node = 1usize;

    let mut r = r0;
    let mut y: State = [seed_u, seed_up];
    let mut k1 = rhs(r, &y);
    let mut h = r0 * 0.01;
    // Tight tolerances keep dense-output kinks between accepted steps below
    // the 1e-6 stencil-residual budget of `ode_residual`.
    let rtol = |r: f64| if r < 1.0 { 1e-12 } else { 1e-11 };

    // The uniform section rounds its cell count up, so the true endpoint can
    // sit a little beyond the requested r_max — integrate to the grid, not
    // the request.
    let r_end = *nodes.last().unwrap();
    let mut steps = 0usize;
    while next_node < nodes.len() {
        steps += 1;
        if steps > 20_000_000 {
            return Err(ProfileError::StiffnessFailure { r, h });
        }
        if h < 1e-14 * r.max(r0) {
            return Err(ProfileError::StiffnessFailure { r, h });
        }
        // Never step past the last node by more than a hair.
        if r + h > r_end {
            h = r_end - r + 1e-12 * r_end;
        }

        let k2 = rhs(r + C[1] * h, &axpyn(&y, h, &A2, &[k1]));
        let k3 = rhs(r + C[2] * h, &axpyn(&y, h, &A3, &[k1, k2]));
        let k4 = rhs(r + C[3] * h, &axpyn(&y, h, &A4, &[k1, k2, k3]));
        let k5 = rhs(r + C[4] * h, &axpyn(&y, h, &A5, &[k1, k2, k3, k4]));
        let k6 = rhs(r + C[5] * h, &axpyn(&y, h, &A6, &[k1, k2, k3, k4, k5]));
        let y_new = axpyn(&y, h, &A7, &[k1, k2, k3, k4, k5, k6]);
        let k7 = rhs(r + h, &y_new);

        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err = 0.0f64;
        for i in 0..2 {
            let mut e = 0.0;
            for j in 0..7 {
                e += E[j] * ks[j][i];
            }
            e *= h;
            let sc = 1e-300 + rtol(r) * y[i].abs().max(y_new[i].abs());
            err = err.max((e / sc).abs());
        }

        if err <= 1.0 {
            // Accepted: tabulate all grid nodes inside this step.
            let seg = DenseSegment::build(r, h, &y, &y_new, &ks);
            while next_node < nodes.len() && nodes[next_node] <= r + h + 1e-15 * r_max {
                let x = nodes[next_node];
                let v = seg.eval(x);
                if v[0] <= 0.0 {
                    return Err(ProfileError::ProfileVanishes { r: x });
                }
                u_values.push(v[0]);
                u_prime.push(v[1]);
                next_node += 1;
            }
            if y_new[0] <= 0.0 {
                return Err(ProfileError::ProfileVanishes { r: r + h });
            }
            r += h;
            y = y_new;
            k1 = k7; // first-same-as-last
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 5.0);
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
        }
    }

    // Tail fit over the last decade: pure power against power·log(2+r).
    let (lnr, lnu, rr) = tail_window(&grid, &u_values);
    let (ap, bp, rms_p) = fit_line(&lnr, &lnu);
    let lnu_log: Vec<f64> = lnu
        .iter()
        .zip(&rr)
        .map(|(&v, &r)| v - (2.0 + r).ln().ln())
        .collect();
    let (al, bl, rms_l) = fit_line(&lnr, &lnu_log);
    let log_corrected = rms_l < rms_p;
    let (a_infinity, c_infinity) = if log_corrected {
        (al, bl.exp())
    } else {
        (ap, bp.exp())
    };

    Ok(HarmonicProfile {
        k,
        dimension: n,
        grid,
        u_values,
        u_prime,
        a_plus_origin: a,
        a_infinity,
        c_infinity,
        log_corrected,
    })
}

/// Last-decade samples (ln r, ln U, r), thinned to at most 512 points.
fn tail_window(grid: &RadialGrid, u: &[f64]) -> (Vec<f64>, Vec<f64>, Vec<f64>) {
    let r_max = grid.r_max();
    let lo = r_max / 10.0;
    let idx: Vec<usize> = (0..grid.len()).filter(|&i| grid.r[i] >= lo).collect();
    let stride = (idx.len() / 512).max(1);
    let mut lnr = Vec::new();
    let mut lnu = Vec::new();
    let mut rr = Vec::new();
    for &i in idx.iter().step_by(stride) {
        lnr.push(grid.r[i].ln());
        lnu.push(u[i].ln());
        rr.push(grid.r[i]);
    }
    (lnr, lnu, rr)
}

/// Least squares y ≈ a x + b; returns (a, b, rms residual).
fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        sxx += (xi - mx) * (xi - mx);
        sxy += (xi - mx) * (yi - my);
    }
    let a = sxy / sxx;
    let b = my - a * mx;
    let mut ss = 0.0;
    for (&xi, &yi) in x.iter().zip(y) {
        let res = yi - a * xi - b;
        ss += res * res;
    }
    (a, b, (ss / n).sqrt())
}

/// Fit y ≈ b (constant); returns (b, rms residual).
fn fit_const(y: &[f64]) -> (f64, f64) {
    let n = y.len() as f64;
    let b = y.iter().sum::<f64>() / n;
    let ss: f64 = y.iter().map(|&v| (v - b) * (v - b)).sum();
    (b, (ss / n).sqrt())
}

impl HarmonicProfile {
    /// Evaluate U_k at any radius: cubic Hermite between nodes, origin power
    /// law below the first node, fitted tail model above the last (anchored
    /// at the last node value for continuity).
    pub fn eval(&self, r: f64) -> f64 {
        let rs = &self.grid.r;
        if r <= rs[0] {
            return self.u_values[0] * (r / rs[0]).powf(self.a_plus_origin);
        }
        let r_last = *rs.last().unwrap();
        if r >= r_last {
            let u_last = *self.u_values.last().unwrap();
            let mut val = u_last * (r / r_last).powf(self.a_infinity);
            if self.log_corrected {
                val *= (2.0 + r).ln() / (2.0 + r_last).ln();
            }
            return val;
        }
        let (j, t, h) = self.segment(r);
        let (y0, y1) = (self.u_values[j], self.u_values[j + 1]);
        let (d0, d1) = (self.u_prime[j], self.u_prime[j + 1]);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * h * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * h * d1
    }

    /// Evaluate U_k′ the same way.
    pub fn eval_prime(&self, r: f64) -> f64 {
        let rs = &self.grid.r;
        if r <= rs[0] {
            let a = self.a_plus_origin;
            return self.u_values[0] * a / rs[0] * (r / rs[0]).powf(a - 1.0);
        }
        let r_last = *rs.last().unwrap();
        if r >= r_last {
            let a = self.a_infinity;
            let u_last = *self.u_values.last().unwrap();
            let base = u_last * (r / r_last).powf(a);
            if self.log_corrected {
                let l = (2.0 + r).ln();
                let l0 = (2.0 + r_last).ln();
                return base / l0 * (a * l / r + 1.0 / (2.0 + r));
            }
            return base * a / r;
        }
        let (j, t, h) = self.segment(r);
        let (y0, y1) = (self.u_values[j], self.u_values[j + 1]);
        let (d0, d1) = (self.u_prime[j], self.u_prime[j + 1]);
        let t2 = t * t;
        (6.0 * t2 - 6.0 * t) * (y0 - y1) / h
            + (3.0 * t2 - 4.0 * t + 1.0) * d0
            + (3.0 * t2 - 2.0 * t) * d1
    }

    fn segment(&self, r: f64) -> (usize, f64, f64) {
        let rs = &self.grid.r;
        let j = rs.partition_point(|&x| x <= r).clamp(1, rs.len() - 1) - 1;
        let h = rs[j + 1] - rs[j];
        ((j), (r - rs[j]) / h, h)
    }
}

/// Scaled sup of the ODE residual over the interior nodes, using 6th-order
/// seven-point stencils (in log-radius on the geometric section, plain on
/// the uniform tail). Each residual is scaled by the largest of the three
/// term magnitudes at that node, after subtracting the f64 roundoff floor
/// of the stencil itself — near the origin a flat profile stores its r²
/// correction below machine precision, where no finite-difference check
/// carries information.
pub fn ode_residual(profile: &HarmonicProfile, spec: &PotentialSpec) -> f64 {
    let grid = &profile.grid;
    let u = &profile.u_values;
    let nf = profile.dimension as f64;
    let k = profile.k;
    let mut worst = 0.0f64;
    // Sum of |coefficients| of the two stencils bounds how much the stencil
    // amplifies a last-bit perturbation of the node values.
    const EPS: f64 = 2.3e-16;
    let amp2 = 1088.0 / 180.0; // second-derivative stencil
    let amp1 = 110.0 / 60.0; // first-derivative stencil

    let mut check = |i: usize, upp: f64, up: f64, floor: f64| {
        let r = grid.r[i];
        let drift = (nf - 1.0) / r * up;
        let react = spec.v_k(k, r) * u[i];
        let res = (upp + drift - react).abs();
        let scale = upp.abs().max(drift.abs()).max(react.abs()).max(1e-300);
        worst = worst.max((res - floor).max(0.0) / scale);
    };

    // Geometric section: x = ln r is uniform; U′ = U_x/r, U″ = (U_xx−U_x)/r².
    let ng = grid.n_geom;
    let dx = std::f64::consts::LN_10 / grid.points_per_decade as f64;
    for i in 3..ng.saturating_sub(3) {
        let ux = d1_stencil(u, i, dx);
        let uxx = d2_stencil(u, i, dx);
        let r = grid.r[i];
        let floor = EPS * u[i].abs() * (amp2 / (dx * dx) + amp1 / dx * nf) / (r * r);
        check(i, (uxx - ux) / (r * r), ux / r, floor);
    }
    // Uniform tail (includes the junction node as its first entry).
    let h = grid.h_uniform;
    for i in (ng - 1 + 3)..grid.len().saturating_sub(3) {
        let r = grid.r[i];
        let floor = EPS * u[i].abs() * (amp2 / (h * h) + amp1 / h * nf / r);
        check(i, d2_stencil(u, i, h), d1_stencil(u, i, h), floor);
    }
    worst
}

fn d1_stencil(f: &[f64], i: usize, h: f64) -> f64 {
    (-f[i - 3] + 9.0 * f[i - 2] - 45.0 * f[i - 1] + 45.0 * f[i + 1] - 9.0 * f[i + 2] + f[i + 3])
        / (60.0 * h)
}

fn d2_stencil(f: &[f64], i: usize, h: f64) -> f64 {
    (2.0 * f[i - 3] - 27.0 * f[i - 2] + 270.0 * f[i - 1] - 490.0 * f[i] + 270.0 * f[i + 1]
        - 27.0 * f[i + 2]
        + 2.0 * f[i + 3])
        / (180.0 * h * h)
}

/// Classify the k = 0 tail against the fixed-exponent models that the
/// endpoint coefficient λ₂ allows:
///
/// * λ₂ > λ\*: pure power r^{A+} (subcritical), and r^{A−} (critical) when
///   A− > −N/2 keeps the critical profile locally square-integrable;
/// * λ₂ = λ\*: power·log r^{A}log(2+r) (threshold) against pure power r^{A}.
///
/// Fits the constant of each model over the last tail decade and returns
/// the smallest-residual tag, or `AmbiguousClass` when the two best
/// residuals are within a factor 2.
pub fn classify_operator(
    profile: &HarmonicProfile,
    spec: &PotentialSpec,
) -> Result<OperatorClass, ProfileError> {
    assert_eq!(profile.k, 0, "classification reads the k = 0 tail");
    let n = spec.dimension;
    let exps = characteristic_exponents(n, spec.lambda2)
        .expect("validated spec has lambda2 above the Hardy threshold");
    let ls = lambda_star(n);
    let at_threshold = (spec.lambda2 - ls).abs() <= 1e-9 * (1.0 + ls.abs());

    let (lnr, lnu, rr) = tail_window(&profile.grid, &profile.u_values);
    // Residual of ln U minus a fixed-slope model, constant fitted.
    let fixed_fit = |slope: f64, with_log: bool| -> (f64, f64) {
        let y: Vec<f64> = lnu
            .iter()
            .zip(lnr.iter().zip(&rr))
            .map(|(&v, (&lr, &r))| {
                let mut val = v - slope * lr;
                if with_log {
                    val -= (2.0 + r).ln().ln();
                }
                val
            })
            .collect();
        fit_const(&y)
    };

    if at_threshold {
        // Double root: the tail is r^A·(c₁·log r + c₂). Dividing out r^A
        // makes both hypotheses linear — W = p·ln r + q against W = q —
        // so the offset c₂ is fitted instead of polluting the residual.
        let a = exps.a_plus;
        let w: Vec<f64> = lnu
            .iter()
            .zip(&lnr)
            .map(|(&lu, &lr)| (lu - a * lr).exp())
            .collect();
        let scale = w.iter().map(|v| v.abs()).fold(0.0f64, f64::max).max(1e-300);
        let (p, _, rms_line) = fit_line(&lnr, &w);
        let (c0, rms_const) = fit_const(&w);
        let rel_line = rms_line / scale;
        let rel_const = rms_const / scale;
        let evidence = vec![
            ("power-log tail (free offset)".to_string(), rel_line),
            ("pure power tail (threshold)".to_string(), rel_const),
        ];
        // Plain power already fits to solver accuracy: no log factor.
        if rel_const <= 1e-6 {
            return Ok(OperatorClass {
                tag: ClassTag::C,
                a_exponent: a,
                c_constant: c0,
                evidence,
                log_corrected: false,
            });
        }
        // The log term must earn its keep: a decisive residual drop and a
        // positive coefficient.
        if p > 0.0 && rel_line <= rel_const / 4.0 {
            return Ok(OperatorClass {
                tag: ClassTag::SStar,
                a_exponent: a,
                c_constant: p,
                evidence,
                log_corrected: true,
            });
        }
        return Err(ProfileError::AmbiguousClass { evidence });
    }

    let mut candidates: Vec<(ClassTag, f64, bool, String)> = Vec::new();
    {
        candidates.push((
            ClassTag::S,
            exps.a_plus,
            false,
            "pure power tail (larger root)".into(),
        ));
        if exps.a_minus > -(n as f64) / 2.0 + 1e-12 {
            candidates.push((
                ClassTag::C,
                exps.a_minus,
                false,
                "pure power tail (smaller root)".into(),
            ));
        }
    }

    let mut scored: Vec<(ClassTag, f64, bool, String, f64, f64)> = candidates
        .into_iter()
        .map(|(tag, slope, with_log, name)| {
            let (b, rms) = fixed_fit(slope, with_log);
            (tag, slope, with_log, name, b, rms.max(1e-15))
        })
        .collect();
    scored.sort_by(|p, q| p.5.partial_cmp(&q.5).unwrap());
    let evidence: Vec<(String, f64)> = scored
        .iter()
        .map(|(_, _, _, name, _, rms)| (name.clone(), *rms))
        .collect();

    if scored.len() >= 2 && scored[1].5 / scored[0].5 < 2.0 {
        return Err(ProfileError::AmbiguousClass { evidence });
    }
    let best = &scored[0];
    Ok(OperatorClass {
        tag: best.0,
        a_exponent: best.1,
        c_constant: best.4.exp(),
        evidence,
        log_corrected: best.2,
    })
}

/// Two-point cubic Hermite on [x0, x1] with endpoint values and slopes.
fn hermite2(x0: f64, x1: f64, y0: f64, y1: f64, d0: f64, d1: f64, x: f64) -> f64 {
    let h = x1 - x0;
    let t = ((x - x0) / h).clamp(0.0, 1.0);
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * d0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * d1
}

/// Drift functional tables: the nested integral
///
/// F_k(r) = ∫₀^r s^{1−N} U_k(s)^{−2} I(s) ds,   I(s) = ∫₀^s τ^{N−1} U_k(τ)² dτ,
///
/// at the profile's grid nodes, together with the exact node derivatives
/// F_k′ = r^{1−N}U_k^{−2}I and I′ = r^{N−1}U_k², so both integrals evaluate
/// off the nodes with Hermite (fourth-order) accuracy.
#[derive(Debug, Clone)]
pub struct DriftTable {
    radii: Vec<f64>,
    /// F_k at the nodes.
    pub f: Vec<f64>,
    /// F_k′ at the nodes (the outer integrand, exact).
    pub f_prime: Vec<f64>,
    /// I at the nodes.
    pub inner: Vec<f64>,
    /// I′ at the nodes (the inner integrand, exact).
    pub inner_prime: Vec<f64>,
}

impl DriftTable {
    fn segment(&self, x: f64) -> usize {
        self.radii
            .partition_point(|&v| v <= x)
            .clamp(1, self.radii.len() - 1)
            - 1
    }

    /// F_k(x), clamped to the tabulated range.
    pub fn eval_f(&self, x: f64) -> f64 {
        let j = self.segment(x);
        hermite2(
            self.radii[j],
            self.radii[j + 1],
            self.f[j],
            self.f[j + 1],
            self.f_prime[j],
            self.f_prime[j + 1],
            x,
        )
    }

    /// I(x), clamped to the tabulated range.
    pub fn eval_inner(&self, x: f64) -> f64 {
        let j = self.segment(x);
        hermite2(
            self.radii[j],
            self.radii[j + 1],
            self.inner[j],
            self.inner[j + 1],
            self.inner_prime[j],
            self.inner_prime[j + 1],
            x,
        )
    }
}

/// Build the drift tables with exact power-law head corrections on both
/// nested integrals.
pub fn compute_drift(profile: &HarmonicProfile) -> DriftTable {
    let r = &profile.grid.r;
    let nf = profile.dimension as f64;
    let a = profile.a_plus_origin;
    let inner_prime: Vec<f64> = r
        .iter()
        .zip(&profile.u_values)
        .map(|(&ri, &ui)| ri.powf(nf - 1.0) * ui * ui)
        .collect();
    let inner = cumulative(r, &inner_prime, HeadRule::PowerLawWith(nf - 1.0 + 2.0 * a));
    let f_prime: Vec<f64> = r
        .iter()
        .zip(&profile.u_values)
        .zip(&inner)
        .map(|((&ri, &ui), &inn)| ri.powf(1.0 - nf) / (ui * ui) * inn)
        .collect();
    let f = cumulative(r, &f_prime, HeadRule::PowerLawWith(1.0));
    DriftTable {
        radii: r.clone(),
        f,
        f_prime,
        inner,
        inner_prime,
    }
}

/// F_k at the grid nodes (see [`compute_drift`] for off-node evaluation).
pub fn compute_f(profile: &HarmonicProfile) -> Vec<f64> {
    compute_drift(profile).f
}

/// Perturbation functional Γ_k: the double integral
///
/// Γ_k(r) = r^k ∫₀^r s^{1−N−2k} ∫₀^s τ^{N+k−1} V(τ) U_k(τ) dτ ds,
///
/// its normalized limit lim Γ_k/r^k, and the deviation in the reconstruction
/// identity it satisfies against U_k. Defined for λ₁ ≥ 0.
pub fn compute_gamma(
    spec: &PotentialSpec,
    profile: &HarmonicProfile,
) -> Result<GammaFunctional, ProfileError> {
    if spec.lambda1 < 0.0 {
        return Err(ProfileError::Unsupported(
            "perturbation integral needs a nonnegative origin coefficient".into(),
        ));
    }
    let r = &profile.grid.r;
    let nf = profile.dimension as f64;
    let kf = profile.k as f64;
    let inner_integrand: Vec<f64> = r
        .iter()
        .zip(&profile.u_values)
        .map(|(&ri, &ui)| ri.powf(nf + kf - 1.0) * spec.v(ri) * ui)
        .collect();
    let inner = cumulative(r, &inner_integrand, HeadRule::PowerLaw);
    let outer_integrand: Vec<f64> = r
        .iter()
        .zip(&inner)
        .map(|(&ri, &inn)| ri.powf(1.0 - nf - 2.0 * kf) * inn)
        .collect();
    let normalized = cumulative(r, &outer_integrand, HeadRule::PowerLaw);
    let values: Vec<f64> = r
        .iter()
        .zip(&normalized)
        .map(|(&ri, &g)| ri.powf(kf) * g)
        .collect();

    // Tail analysis of the normalized sequence over the last decade.
    let r_max = profile.grid.r_max();
    let tail_idx: Vec<usize> = (0..r.len()).filter(|&i| r[i] >= r_max / 10.0).collect();
    let partial_stride = (tail_idx.len() / 8).max(1);
    let partial_sums: Vec<(f64, f64)> = tail_idx
        .iter()
        .step_by(partial_stride)
        .map(|&i| (r[i], normalized[i]))
        .collect();
    let g_last = *normalized.last().unwrap();
    let sup_tail_integrand = tail_idx
        .iter()
        .map(|&i| outer_integrand[i].abs())
        .fold(0.0f64, f64::max);
    let limit = if sup_tail_integrand == 0.0 {
        Some(g_last)
    } else {
        // Fit the integrand's tail power; q < −1 means a convergent
        // remainder we can add in closed form.
        let pos: Vec<usize> = tail_idx
            .iter()
            .copied()
            .filter(|&i| outer_integrand[i] != 0.0)
            .collect();
        let same_sign = pos
            .iter()
            .all(|&i| outer_integrand[i].signum() == outer_integrand[pos[0]].signum());
        if same_sign && pos.len() > 16 {
            let lx: Vec<f64> = pos.iter().map(|&i| r[i].ln()).collect();
            let ly: Vec<f64> = pos.iter().map(|&i| outer_integrand[i].abs().ln()).collect();
            let (q, _, _) = fit_line(&lx, &ly);
            if q < -1.05 {
                let remainder = outer_integrand[r.len() - 1] * r_max / (-1.0 - q);
                Some(g_last + remainder)
            } else {
                None
            }
        } else if sup_tail_integrand * r_max < 1e-10 * (1.0 + g_last.abs()) {
            Some(g_last)
        } else {
            None
        }
    };

    // Reconstruction identity on [1, r_max]: U = r^k + Γ when the origin
    // coefficient vanishes, U = Γ when it is positive.
    let homogeneous = spec.lambda1 == 0.0;
    let mut identity_dev = 0.0f64;
    for i in 0..r.len() {
        if r[i] < 1.0 {
            continue;
        }
        let model = if homogeneous {
            r[i].powf(kf) + values[i]
        } else {
            values[i]
        };
        identity_dev = identity_dev.max((profile.u_values[i] - model).abs() / profile.u_values[i]);
    }

    Ok(GammaFunctional {
        k: profile.k,
        values,
        normalized,
        limit,
        partial_sums,
        identity_dev,
    })
}

/// Total mass Λ = ∫₀^∞ τ^{N−1} V(τ) U₀(τ) dτ for potentials with decaying
/// tails: numeric up to r_max plus the closed-form power tail
/// μ c\* r_max^{N−d}/(d−N). Diverges unless d > N.
pub fn compute_lambda_mass(
    spec: &PotentialSpec,
    profile: &HarmonicProfile,
) -> Result<f64, ProfileError> {
    assert_eq!(profile.k, 0, "total mass reads the k = 0 profile");
    match &spec.family {
        PotentialFamily::Zero => Ok(0.0),
        PotentialFamily::Decaying { mu, d } => {
            let n = spec.dimension;
            if *d <= n as f64 {
                return Err(ProfileError::TailDivergence { d: *d, n });
            }
            let r = &profile.grid.r;
            let nf = n as f64;
            let integrand: Vec<f64> = r
                .iter()
                .zip(&profile.u_values)
                .map(|(&ri, &ui)| ri.powf(nf - 1.0) * spec.v(ri) * ui)
                .collect();
            let numeric = *cumulative(r, &integrand, HeadRule::PowerLaw).last().unwrap();
            // Beyond r_max: V ≈ μ r^{−d}, U₀ ≈ c*, so the remainder is
            // μ c* r_max^{N−d}/(d−N).
            let r_max = profile.grid.r_max();
            let tail = mu * profile.c_infinity * r_max.powf(nf - *d) / (*d - nf);
            Ok(numeric + tail)
        }
        _ => Err(ProfileError::Unsupported(
            "total mass needs a potential with a decaying power tail".into(),
        )),
    }
}

/// Golden-section maximizer of f on [a, b].
fn golden_max(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 * (1.0 + b.abs()) {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Locate the maximizer set Π of U₀ on the grid: plateau detection, the
/// empty case (supremum only approached at the boundary), and golden-section
/// refinement of interior maximizers.
pub fn compute_pi(profile: &HarmonicProfile) -> PiSummary {
    let u = &profile.u_values;
    let r = &profile.grid.r;
    let max_u = u.iter().copied().fold(f64::MIN, f64::max);
    let min_u = u.iter().copied().fold(f64::MAX, f64::min);

    if max_u - min_u < 1e-10 * max_u.abs() {
        return PiSummary {
            max_u,
            maximizers: vec![0.0],
            min_pi: Some(0.0),
            is_empty: false,
            is_plateau: true,
        };
    }

    let argmax = (0..u.len()).max_by(|&i, &j| u[i].partial_cmp(&u[j]).unwrap()).unwrap();
    // Supremum chased at the outer boundary with U still climbing: no
    // maximizer exists on [0, ∞).
    if argmax == u.len() - 1 && *profile.u_prime.last().unwrap() > 0.0 {
        return PiSummary {
            max_u,
            maximizers: Vec::new(),
            min_pi: None,
            is_empty: true,
            is_plateau: false,
        };
    }

    // Collect near-maximal nodes, cluster consecutive runs, refine each.
    let tol = 1e-10 * max_u.abs();
    let candidate: Vec<usize> = (0..u.len()).filter(|&i| u[i] >= max_u - tol).collect();
    let mut maximizers = Vec::new();
    let mut run_start = 0usize;
    for t in 0..=candidate.len() {
        let run_ends = t == candidate.len() || (t > 0 && candidate[t] != candidate[t - 1] + 1);
        if run_ends {
            let lo_idx = candidate[run_start];
            let hi_idx = candidate[t - 1];
            if lo_idx == 0 {
                // The first node wins and U decreases outward: the true
                // maximizer sits at the origin below the grid.
                maximizers.push(0.0);
            } else {
                let a = r[lo_idx - 1];
                let b = r[(hi_idx + 1).min(r.len() - 1)];
                let f = |x: f64| profile.eval(x);
                maximizers.push(golden_max(&f, a, b));
            }
            run_start = t;
        }
    }
    maximizers.sort_by(|a, b| a.partial_cmp(b).unwrap());
    maximizers.dedup_by(|a, b| (*a - *b).abs() < 1e-9 * (1.0 + b.abs()));
    let min_pi = maximizers.first().copied();
    PiSummary {
        max_u,
        maximizers,
        min_pi,
        is_empty: false,
        is_plateau: false,
    }
}

/// Score function combining mode masses with the profile geometry:
///
/// S(r) = −(N/c\*²) M U₀(r) F₀(r) + (1/c₁²) |Ξ| U₁(r),
///
/// where M is the raw radial pairing of the k = 0 data, Ξ the k = 1
/// coefficient vector, and c\*, c₁ the tail constants of U₀, U₁. The
/// maximizer over Π(U₀) locates bounded hot-spot limits.
pub fn compute_s(
    profile0: &HarmonicProfile,
    profile1: &HarmonicProfile,
    m_raw: f64,
    xi_norm: f64,
) -> STable {
    assert_eq!(profile0.grid.len(), profile1.grid.len(), "profiles share the grid");
    let nf = profile0.dimension as f64;
    let c0 = profile0.c_infinity;
    let c1 = profile1.c_infinity;
    let drift = compute_drift(profile0);
    let f_table = drift.f.clone();
    let r = profile0.grid.r.clone();
    let values: Vec<f64> = (0..r.len())
        .map(|i| {
            -(nf / (c0 * c0)) * m_raw * profile0.u_values[i] * f_table[i]
                + xi_norm / (c1 * c1) * profile1.u_values[i]
        })
        .collect();

    let pi = compute_pi(profile0);
    let s_of = |x: f64| -> f64 {
        -(nf / (c0 * c0)) * m_raw * profile0.eval(x) * drift.eval_f(x)
            + xi_norm / (c1 * c1) * profile1.eval(x)
    };

    let maximizer = if pi.is_empty {
        None
    } else if pi.is_plateau {
        // Π is all of [0, ∞): maximize S itself over the grid.
        let arg = (0..r.len())
            .max_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap())
            .unwrap();
        if arg == 0 {
            Some(0.0)
        } else if arg == r.len() - 1 {
            Some(r[arg])
        } else {
            Some(golden_max(&s_of, r[arg - 1], r[arg + 1]))
        }
    } else {
        pi.maximizers
            .iter()
            .copied()
            .max_by(|&a, &b| s_of(a).partial_cmp(&s_of(b)).unwrap())
    };
    let s_at_maximizer = maximizer.map(|m| s_of(m)).unwrap_or(f64::NAN);
    STable {
        radii: r,
        values,
        maximizer,
        s_at_maximizer,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::integrate_decaying;

    fn zero3() -> PotentialSpec {
        PotentialSpec::zero(3)
    }

    #[test]
    fn zero_potential_k0_is_constant() {
        let p = solve_profile(&zero3(), 0, 1e3).unwrap();
        let dev = p.u_values.iter().map(|&u| (u - 1.0).abs()).fold(0.0, f64::max);
        println!("zero k=0: max |U-1| = {dev:.3e}");
        assert!(dev < 1e-8);
        assert!(p.a_infinity.abs() < 1e-6);
        assert!((p.c_infinity - 1.0).abs() < 1e-6);
        assert!(!p.log_corrected);
    }

    #[test]
    fn zero_potential_k1_is_linear() {
        let p = solve_profile(&zero3(), 1, 1e3).unwrap();
        let dev = p
            .grid
            .r
            .iter()
            .zip(&p.u_values)
            .map(|(&r, &u)| (u / r - 1.0).abs())
            .fold(0.0, f64::max);
        println!("zero k=1: max |U/r - 1| = {dev:.3e}");
        assert!(dev < 1e-8);
        assert!((p.a_infinity - 1.0).abs() < 1e-6);
    }

    #[test]
    fn hardy_profiles_are_pure_powers() {
        // V = λ/r² has the exact solution U_k = r^{A+(λ+ω_k)}; exercise a
        // positive and a negative exponent.
        for (n, lambda, k) in [(3u32, 2.0f64, 0u32), (3, -0.2, 0), (4, 2.0, 1)] {
            let spec = PotentialSpec::hardy(n, lambda).unwrap();
            let a = characteristic_exponents(n, lambda + angular_eigenvalue(n, k))
                .unwrap()
                .a_plus;
            let p = solve_profile(&spec, k, 1e3).unwrap();
            let dev = p
                .grid
                .r
                .iter()
                .zip(&p.u_values)
                .map(|(&r, &u)| (u / r.powf(a) - 1.0).abs())
                .fold(0.0, f64::max);
            println!("hardy N={n} lambda={lambda} k={k}: a={a:.6}, max rel dev = {dev:.3e}");
            assert!(dev < 1e-8, "dev {dev} too large");
            assert!((p.a_infinity - a).abs() < 1e-6);
            assert!((p.c_infinity - 1.0).abs() < 1e-5);
        }
    }

    #[test]
    fn series_start_matches_first_nodes() {
        let spec = PotentialSpec::lorentz(3, 1.0).unwrap();
        let p = solve_profile(&spec, 0, 1e3).unwrap();
        let a = p.a_plus_origin;
        let w0 = spec.origin_remainder(p.grid.r[0]);
        let c2 = w0 / (2.0 * (2.0 * a + 3.0));
        for i in 0..3 {
            let r = p.grid.r[i];
            let series = r.powf(a) * (1.0 + c2 * r * r);
            let rel = (p.u_values[i] - series).abs() / series;
            assert!(rel < 1e-8, "node {i}: rel {rel}");
        }
    }

    #[test]
    fn residual_invariant_across_families() {
        let cases: Vec<(PotentialSpec, u32)> = vec![
            (PotentialSpec::lorentz(3, 1.0).unwrap(), 0),
            (PotentialSpec::lorentz(3, 1.0).unwrap(), 1),
            (PotentialSpec::decaying(3, 1.0, 3.0).unwrap(), 0),
            (PotentialSpec::hardy(4, -1.0).unwrap(), 0),
            (PotentialSpec::decaying(4, 0.2, 3.0).unwrap(), 2),
        ];
        for (spec, k) in cases {
            let p = solve_profile(&spec, k, 1e3).unwrap();
            let res = ode_residual(&p, &spec);
            println!(
                "residual N={} k={k} family={:?}: {res:.3e}",
                spec.dimension,
                std::mem::discriminant(&spec.family)
            );
            assert!(res < 1e-6, "scaled residual {res} exceeds 1e-6");
        }
    }

    #[test]
    fn drift_functional_closed_forms() {
        // Zero potential: F(r) = r²/(2N) exactly; inverse-square: the same
        // derivation with U = r^A gives F(r) = r²/(2(N+2A)).
        let p = solve_profile(&zero3(), 0, 1e3).unwrap();
        let f = compute_f(&p);
        for (i, &r) in p.grid.r.iter().enumerate() {
            if !(0.1..=100.0).contains(&r) {
                continue;
            }
            let rel = (f[i] - r * r / 6.0).abs() / (r * r / 6.0);
            assert!(rel < 1e-6, "zero potential F at r={r}: rel {rel}");
        }

        let spec = PotentialSpec::hardy(3, 2.0).unwrap();
        let a = 1.0;
        let p = solve_profile(&spec, 0, 1e3).unwrap();
        let f = compute_f(&p);
        for (i, &r) in p.grid.r.iter().enumerate() {
            if !(0.1..=100.0).contains(&r) {
                continue;
            }
            let expect = r * r / (2.0 * (3.0 + 2.0 * a));
            let rel = (f[i] - expect).abs() / expect;
            assert!(rel < 1e-6, "inverse-square F at r={r}: rel {rel}");
        }
    }

    #[test]
    fn drift_functional_shape() {
        // F increasing from 0 with F″ → 1/N at the origin when the origin
        // coefficient vanishes.
        let spec = PotentialSpec::decaying(3, 1.0, 3.0).unwrap();
        let p = solve_profile(&spec, 0, 1e3).unwrap();
        let f = compute_f(&p);
        assert!(f[0] > 0.0 && f[0] < 1e-10);
        assert!(f.windows(2).all(|w| w[1] > w[0]), "F must increase");
        // Nonuniform 3-point second difference near r = 1e-3.
        let j = p.grid.r.partition_point(|&x| x < 1e-3);
        let (x0, x1, x2) = (p.grid.r[j], p.grid.r[j + 1], p.grid.r[j + 2]);
        let fpp = 2.0 * ((f[j + 2] - f[j + 1]) / (x2 - x1) - (f[j + 1] - f[j]) / (x1 - x0))
            / (x2 - x0);
        assert!(
            (fpp - 1.0 / 3.0).abs() < 1e-3,
            "F'' near origin = {fpp}, want 1/3"
        );
    }

    #[test]
    fn gamma_reconstruction_identities() {
        // Zero potential: Γ ≡ 0 and U_k = r^k exactly.
        let g = compute_gamma(&zero3(), &solve_profile(&zero3(), 1, 1e3).unwrap()).unwrap();
        assert!(g.values.iter().all(|&v| v.abs() < 1e-12));
        assert_eq!(g.gamma_infinity().unwrap(), 0.0);

        // Bounded-core potential, homogeneous origin: U = r^k + Γ_k.
        let spec = PotentialSpec::lorentz(3, 1.0).unwrap();
        for k in [0u32, 1] {
            let p = solve_profile(&spec, k, 1e3).unwrap();
            let g = compute_gamma(&spec, &p).unwrap();
            println!("lorentz k={k}: identity dev {:.3e}", g.identity_dev);
            assert!(g.identity_dev < 1e-5);
        }

        // Inverse-square potential, positive origin coefficient: U = Γ.
        let spec = PotentialSpec::hardy(3, 2.0).unwrap();
        let p = solve_profile(&spec, 0, 1e3).unwrap();
        let g = compute_gamma(&spec, &p).unwrap();
        println!("inverse-square: identity dev {:.3e}", g.identity_dev);
        assert!(g.identity_dev < 1e-5);
    }

    #[test]
    fn gamma_limit_converges_for_decaying_tail() {
        let spec = PotentialSpec::decaying(3, 1.0, 4.0).unwrap();
        let p = solve_profile(&spec, 0, 1e4).unwrap();
        let g = compute_gamma(&spec, &p).unwrap();
        let lim = g.gamma_infinity().unwrap();
        println!("decaying(1,4) N=3: Gamma_0 limit = {lim:.12e}");
        assert!(lim.is_finite() && lim > 0.0);
        // The tail constant obeys c* = Γ₀(∞) + 1 for a homogeneous origin.
        // The free fit absorbs part of the O(1/r) approach into its slope,
        // so the agreement is a few 1e-3 here; the fixed-slope constant from
        // classification is the accurate estimator (tested separately).
        assert!(
            (p.c_infinity - (lim + 1.0)).abs() < 5e-3 * p.c_infinity,
            "c* {} vs Gamma-limit + 1 {}",
            p.c_infinity,
            lim + 1.0
        );
        // Frozen regression of the limit itself.
        assert!((lim - 5.707965104807e-1).abs() < 1e-9);
    }

    #[test]
    fn gamma_limit_diverges_for_inverse_square_tail() {
        // λ₂ > 0 makes U grow like r^{A+} and Γ₀/1 diverge.
        let spec = PotentialSpec::lorentz(3, 1.0).unwrap();
        let p = solve_profile(&spec, 0, 1e3).unwrap();
        let g = compute_gamma(&spec, &p).unwrap();
        match g.gamma_infinity() {
            Err(ProfileError::DivergentGamma { partial_sums }) => {
                assert!(partial_sums.len() >= 4);
                // Partial sums must visibly grow.
                let first = partial_sums.first().unwrap().1;
                let last = partial_sums.last().unwrap().1;
                assert!(last > first * 1.5, "partial sums {first} -> {last}");
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn total_mass_zero_and_cross_checked() {
        let p = solve_profile(&zero3(), 0, 1e3).unwrap();
        assert_eq!(compute_lambda_mass(&zero3(), &p).unwrap(), 0.0);

        // Independent oracle: adaptive quadrature of τ²V(τ)U(τ) with the
        // profile's interpolant, tail handled by the decaying-integral
        // driver.
        let spec = PotentialSpec::decaying(3, 1.0, 5.0).unwrap();
        let p = solve_profile(&spec, 0, 1e4).unwrap();
        let lam = compute_lambda_mass(&spec, &p).unwrap();
        let oracle = integrate_decaying(
            &|r| r * r * spec.v(r) * p.eval(r),
            10.0,
            1e-12,
        );
        println!("decaying(1,5) N=3: mass = {lam:.12e}, oracle = {:.12e}", oracle.value);
        // Two independent quadrature paths (cumulative stencils + closed
        // tail against adaptive bisection on the interpolant).
        assert!((lam - oracle.value).abs() < 1e-6 * oracle.value.abs());
        // Frozen regression of the computed value.
        assert!((lam - 3.813114005386e-1).abs() < 1e-9);

        // Sign follows the potential.
        let neg = PotentialSpec::decaying(3, -0.5, 5.0).unwrap();
        let pn = solve_profile(&neg, 0, 1e4).unwrap();
        assert!(compute_lambda_mass(&neg, &pn).unwrap() < 0.0);
    }

    #[test]
    fn total_mass_divergence_guard() {
        // d ≤ N: divergent.
        let spec = PotentialSpec::decaying(3, 1.0, 3.0).unwrap();
        let p = solve_profile(&spec, 0, 1e3).unwrap();
        match compute_lambda_mass(&spec, &p) {
            Err(ProfileError::TailDivergence { d, n }) => {
                assert_eq!(d, 3.0);
                assert_eq!(n, 3);
            }
            other => panic!("expected divergence, got {other:?}"),
        }
    }

    #[test]
    fn maximizer_set_cases() {
        // Flat profile: plateau, min Π = 0.
        let p = solve_profile(&zero3(), 0, 1e3).unwrap();
        let pi = compute_pi(&p);
        assert!(pi.is_plateau && pi.min_pi == Some(0.0));

        // Growing tail: Π empty.
        let spec = PotentialSpec::lorentz(3, 1.0).unwrap();
        let pi = compute_pi(&solve_profile(&spec, 0, 1e3).unwrap());
        assert!(pi.is_empty && pi.min_pi.is_none());

        // Negative well at threshold-allowed strength: U decreases from the
        // origin, so Π = {0}.
        let spec = PotentialSpec::lorentz(3, -0.2).unwrap();
        let p = solve_profile(&spec, 0, 1e3).unwrap();
        let pi = compute_pi(&p);
        assert!(!pi.is_empty && !pi.is_plateau);
        assert_eq!(pi.min_pi, Some(0.0));
        assert!((pi.max_u - 1.0).abs() < 1e-4, "U(0) should stay near 1");
    }

    #[test]
    fn score_maximizer_closed_form() {
        // Zero potential: S(r) = −M r²/2 + Ξ r peaks at r = Ξ/M.
        let p0 = solve_profile(&zero3(), 0, 1e3).unwrap();
        let p1 = solve_profile(&zero3(), 1, 1e3).unwrap();
        let s = compute_s(&p0, &p1, 2.0, 3.0);
        for (i, &r) in s.radii.iter().enumerate() {
            if !(0.1..=10.0).contains(&r) {
                continue;
            }
            let expect = -r * r + 3.0 * r;
            assert!(
                (s.values[i] - expect).abs() < 1e-6 * (1.0 + expect.abs()),
                "S at r={r}: {} vs {expect}",
                s.values[i]
            );
        }
        let m = s.maximizer.unwrap();
        assert!((m - 1.5).abs() < 1e-6, "maximizer {m}, want 1.5");
        assert!((s.s_at_maximizer - 2.25).abs() < 1e-6);
    }

    #[test]
    fn outward_derivative_identity() {
        // For a homogeneous origin, U′(r) = r^{1−N} ∫₀^r τ^{N−1} V U dτ.
        let spec = PotentialSpec::decaying(3, 1.0, 3.0).unwrap();
        let p = solve_profile(&spec, 0, 1e3).unwrap();
        let r = &p.grid.r;
        let integrand: Vec<f64> = r
            .iter()
            .zip(&p.u_values)
            .map(|(&ri, &ui)| ri * ri * spec.v(ri) * ui)
            .collect();
        let cum = cumulative(r, &integrand, HeadRule::PowerLaw);
        let mut worst = 0.0f64;
        for i in 0..r.len() {
            let lhs = p.u_prime[i];
            let rhs = cum[i] / (r[i] * r[i]);
            let scale = lhs.abs().max(p.u_values[i] / r[i]).max(1e-300);
            worst = worst.max((lhs - rhs).abs() / scale);
        }
        println!("derivative identity: worst scaled dev = {worst:.3e}");
        assert!(worst < 1e-5);
    }

    #[test]
    fn classification_across_families() {
        // Bounded core with positive inverse-square tail: subcritical, with
        // exponent the larger root of α² + α − 1 = 0, i.e. (√5 − 1)/2.
        let spec = PotentialSpec::lorentz(3, 1.0).unwrap();
        let p = solve_profile(&spec, 0, 1e4).unwrap();
        let c = classify_operator(&p, &spec).unwrap();
        assert_eq!(c.tag, ClassTag::S);
        assert!((c.a_exponent - (5f64.sqrt() - 1.0) / 2.0).abs() < 1e-12);
        assert!(!c.log_corrected);

        // Decaying potential in N=3: subcritical with exponent 0, constant
        // tail = 1 + Γ₀(∞).
        let spec = PotentialSpec::decaying(3, 1.0, 4.0).unwrap();
        let p = solve_profile(&spec, 0, 1e4).unwrap();
        let c = classify_operator(&p, &spec).unwrap();
        assert_eq!(c.tag, ClassTag::S);
        assert_eq!(c.a_exponent, 0.0);
        let g = compute_gamma(&spec, &p).unwrap();
        assert!((c.c_constant - (g.gamma_infinity().unwrap() + 1.0)).abs() < 1e-3);

        // Hardy threshold in N=4: exact power r^{−1}, no log — critical.
        let spec = PotentialSpec::hardy(4, -1.0).unwrap();
        let p = solve_profile(&spec, 0, 1e4).unwrap();
        let c = classify_operator(&p, &spec).unwrap();
        assert_eq!(c.tag, ClassTag::C);
        assert!((c.a_exponent + 1.0).abs() < 1e-12);

        // Zero potential in N=2 sits at the threshold with a constant
        // profile: the pure power wins over the log model — critical.
        let spec = PotentialSpec::zero(2);
        let p = solve_profile(&spec, 0, 1e4).unwrap();
        let c = classify_operator(&p, &spec).unwrap();
        assert_eq!(c.tag, ClassTag::C);
        assert_eq!(c.a_exponent, 0.0);

        // Decaying potential in N=2: the tail picks up the log factor.
        let spec = PotentialSpec::decaying(2, 1.0, 4.0).unwrap();
        let p = solve_profile(&spec, 0, 1e4).unwrap();
        let c = classify_operator(&p, &spec).unwrap();
        assert_eq!(c.tag, ClassTag::SStar);
        assert!(c.log_corrected);
        assert!(p.log_corrected, "profile fit should also prefer the log model");
    }

    #[test]
    fn ambiguous_classification_is_reported() {
        // A tail coefficient a hair above the critical threshold leaves the
        // two root exponents 0.02 apart. Synthesize an even mixture of the
        // two branches: each one-root model misfits by a comparable amount,
        // so no decisive call is possible at this window.
        let spec = PotentialSpec::lorentz(3, -0.2499).unwrap();
        let mut p = solve_profile(&spec, 0, 1e3).unwrap();
        let exps = characteristic_exponents(3, -0.2499).unwrap();
        for (i, r) in p.grid.r.clone().iter().enumerate() {
            p.u_values[i] = 0.65 * r.powf(exps.a_plus) + 0.65 * r.powf(exps.a_minus);
        }
        match classify_operator(&p, &spec) {
            Err(ProfileError::AmbiguousClass { evidence }) => {
                assert_eq!(evidence.len(), 2);
                println!("ambiguous evidence: {evidence:?}");
            }
            other => panic!("expected ambiguity, got {other:?}"),
        }
    }

    #[test]
    fn mode_gap_orders_tail_exponents() {
        // The fitted tail exponents must reproduce A+(λ₂+ω_k): the k = 1
        // exponent strictly exceeds the k = 0 one, with gap exactly 1 when
        // λ₂ = 0 and the closed-form root gap otherwise.
        for spec in [
            zero3(),
            PotentialSpec::lorentz(3, 1.0).unwrap(),
            PotentialSpec::decaying(4, 0.2, 3.0).unwrap(),
        ] {
            let n = spec.dimension;
            let p0 = solve_profile(&spec, 0, 1e3).unwrap();
            let p1 = solve_profile(&spec, 1, 1e3).unwrap();
            let a0 = characteristic_exponents(n, spec.lambda2).unwrap().a_plus;
            let a1 = characteristic_exponents(n, spec.lambda2 + angular_eigenvalue(n, 1))
                .unwrap()
                .a_plus;
            println!(
                "mode gap N={n}: fitted ({:.6}, {:.6}) vs roots ({a0:.6}, {a1:.6})",
                p0.a_infinity, p1.a_infinity
            );
            assert!((p0.a_infinity - a0).abs() < 1e-3);
            assert!((p1.a_infinity - a1).abs() < 1e-3);
            assert!(a1 > a0, "tail exponents must be strictly ordered");
            if spec.lambda2 == 0.0 {
                assert!((a1 - a0 - 1.0).abs() < 1e-12, "gap is exactly 1 when lambda2 = 0");
            }
        }
    }

    #[test]
    fn vanishing_profile_is_caught() {
        // A strong negative well drives U₀ through zero.
        let spec = PotentialSpec::decaying(3, -40.0, 4.0).unwrap();
        match solve_profile(&spec, 0, 1e3) {
            Err(ProfileError::ProfileVanishes { r }) => {
                println!("profile vanished at r = {r:.4}");
                assert!(r > 0.0);
            }
            other => panic!("expected vanishing profile, got {other:?}"),
        }
    }

    #[test]
    fn eval_interpolates_between_nodes() {
        let spec = PotentialSpec::hardy(3, 2.0).unwrap();
        let p = solve_profile(&spec, 0, 1e3).unwrap();
        // U = r between nodes, below the grid, and beyond it.
        for r in [5e-7, 1.3e-4, 0.7342, 12.345, 999.0, 5e3] {
            let rel = (p.eval(r) - r).abs() / r;
            assert!(rel < 1e-6, "eval at {r}: rel {rel}");
            let relp = (p.eval_prime(r) - 1.0).abs();
            assert!(relp < 1e-4, "eval_prime at {r}: dev {relp}");
        }
    }
}
