//! Quadrature: cumulative grid integrals, fixed-panel Gauss–Legendre, and
//! adaptive Gauss–Kronrod with semi-infinite helpers.
//!
//! Three workhorses:
//!
//! * [`cumulative`] integrates tabulated data on the (geometric + uniform)
//!   profile grids to 4th order, with an optional power-law head capturing
//!   ∫₀^{r₀} of integrands that behave like c·r^p near the origin — the
//!   nested functionals F_k and Γ_k are built from exactly such data.
//! * [`gl4_integrate`] is a fixed 4-point Gauss–Legendre rule per panel
//!   (degree-7 exactness), used for the finite-volume masses and resistances
//!   where smooth integrands meet a fixed cell structure.
//! * [`gk_integrate`] is adaptive 15-point Kronrod / 7-point Gauss bisection
//!   for everything requiring certified accuracy, with
//!   [`integrate_decaying`] extending it to [0, ∞) for rapidly decaying
//!   integrands via the substitution ρ = r² beyond a break radius (the
//!   Gaussian-weighted moment integrals decay like e^{−r²·const} and keep a
//!   uniform decay scale in ρ, where panel subdivision is cheap).

/// Integral over [lo, hi] of the Lagrange cubic through (xs[i], ys[i]).
fn integ_cubic(xs: &[f64; 4], ys: &[f64; 4], lo: f64, hi: f64) -> f64 {
    // Shift to the interval midpoint for numerical stability.
    let mid = 0.5 * (lo + hi);
    let x: Vec<f64> = xs.iter().map(|v| v - mid).collect();
    let (a, b) = (lo - mid, hi - mid);
    // Monomial integrals ∫ x^k over [a, b].
    let m0 = b - a;
    let m1 = 0.5 * (b * b - a * a);
    let m2 = (b * b * b - a * a * a) / 3.0;
    let m3 = (b * b * b * b - a * a * a * a) / 4.0;
    let mut total = 0.0;
    for j in 0..4 {
        // Expand Π_{m≠j} (x − x_m) = x³ + c2 x² + c1 x + c0.
        let mut others = [0.0; 3];
        let mut idx = 0;
        for m in 0..4 {
            if m != j {
                others[idx] = x[m];
                idx += 1;
            }
        }
        let (p, q, s) = (others[0], others[1], others[2]);
        let c2 = -(p + q + s);
        let c1 = p * q + p * s + q * s;
        let c0 = -p * q * s;
        let denom = (x[j] - p) * (x[j] - q) * (x[j] - s);
        total += ys[j] * (m3 + c2 * m2 + c1 * m1 + c0 * m0) / denom;
    }
    total
}

/// How to account for the un-tabulated head interval [0, x₀].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HeadRule {
    /// No head contribution (x₀ = 0, or the head is known to vanish).
    Zero,
    /// Fit f ≈ f(x₀)·(x/x₀)^p from the first two samples and integrate the
    /// power law exactly. Falls back to a triangle estimate when the samples
    /// do not support a power fit (non-positive values or p ≤ −0.99).
    PowerLaw,
    /// Same as `PowerLaw` with a prescribed exponent.
    PowerLawWith(f64),
}

/// Cumulative integral G(x_j) = ∫₀^{x_j} f on a strictly increasing grid.
///
/// Each interval is integrated with the cubic through its four nearest
/// nodes (4th order on smooth data, exact for cubic polynomials); the head
/// interval [0, x₀] is handled per `head`.
pub fn cumulative(x: &[f64], f: &[f64], head: HeadRule) -> Vec<f64> {
    let n = x.len();
    assert_eq!(n, f.len());
    assert!(n >= 4, "cumulative integration needs at least 4 nodes");
    let head_val = match head {
        HeadRule::Zero => 0.0,
        HeadRule::PowerLaw | HeadRule::PowerLawWith(_) => {
            if x[0] <= 0.0 {
                0.0
            } else {
                let p = match head {
                    HeadRule::PowerLawWith(p) => Some(p),
                    _ => {
                        if f[0] > 0.0 && f[1] > 0.0 && x[1] > x[0] {
                            Some((f[1] / f[0]).ln() / (x[1] / x[0]).ln())
                        } else if f[0] < 0.0 && f[1] < 0.0 {
                            Some((f[1] / f[0]).ln() / (x[1] / x[0]).ln())
                        } else {
                            None
                        }
                    }
                };
                match p {
                    Some(p) if p > -0.99 && p.is_finite() => f[0] * x[0] / (p + 1.0),
                    _ => 0.5 * f[0] * x[0],
                }
            }
        }
    };
    let mut g = Vec::with_capacity(n);
    g.push(head_val);
    let mut acc = head_val;
    for i in 0..n - 1 {
        // Stencil [i−1, i+2] clamped into range.
        let s = i.saturating_sub(1).min(n - 4);
        let xs = [x[s], x[s + 1], x[s + 2], x[s + 3]];
        let ys = [f[s], f[s + 1], f[s + 2], f[s + 3]];
        acc += integ_cubic(&xs, &ys, x[i], x[i + 1]);
        g.push(acc);
    }
    g
}

/// 4-point Gauss–Legendre nodes/weights on [−1, 1].
const GL4_X: [f64; 4] = [
    -0.861_136_311_594_052_6,
    -0.339_981_043_584_856_3,
    0.339_981_043_584_856_3,
    0.861_136_311_594_052_6,
];
const GL4_W: [f64; 4] = [
    0.347_854_845_137_453_9,
    0.652_145_154_862_546_1,
    0.652_145_154_862_546_1,
    0.347_854_845_137_453_9,
];

/// Fixed-panel Gauss–Legendre: `panels` equal panels of 4 points each.
pub fn gl4_integrate(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, panels: usize) -> f64 {
    assert!(panels >= 1);
    let h = (hi - lo) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = lo + p as f64 * h;
        let c = a + 0.5 * h;
        let scale = 0.5 * h;
        for i in 0..4 {
            total += GL4_W[i] * f(c + scale * GL4_X[i]);
        }
    }
    total * 0.5 * h
}

/// 15-point Kronrod nodes (nonnegative half; symmetric about 0).
const GK15_X: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];
const GK15_WK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];
/// Embedded 7-point Gauss weights (for nodes at odd indices 1, 3, 5, 7).
const GK15_WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// One Kronrod panel: returns (15-point value, |K15 − G7| error estimate).
fn gk15_panel(f: &dyn Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let mut k = 0.0;
    let mut g = 0.0;
    for i in 0..8 {
        let (fl, fr) = if GK15_X[i] == 0.0 {
            let v = f(c);
            (v, 0.0)
        } else {
            (f(c - h * GK15_X[i]), f(c + h * GK15_X[i]))
        };
        let pair = fl + fr;
        k += GK15_WK[i] * pair;
        if i % 2 == 1 {
            g += GK15_WG[i / 2] * pair;
        }
    }
    ((k * h), ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod integration of `f` over [lo, hi].
///
/// Bisects the worst panel until every panel satisfies the mixed tolerance
/// err ≤ max(abs_tol, rel_tol·|total|)·(panel share). Returns the value and
/// the summed error estimate.
pub fn gk_integrate(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> (f64, f64) {
    // (lo, hi, value, err), kept as a simple work stack.
    let mut done: Vec<(f64, f64)> = Vec::new();
    let mut stack = vec![(lo, hi, 0usize)];
    let mut first_pass = true;
    let mut total_est = 0.0;
    while let Some((a, b, depth)) = stack.pop() {
        let (v, e) = gk15_panel(f, a, b);
        if first_pass {
            total_est = v.abs();
            first_pass = false;
        }
        let width_share = ((b - a) / (hi - lo)).max(1e-3);
        let budget = (abs_tol + rel_tol * total_est.max(1e-300)) * width_share;
        if e <= budget || depth >= 52 || (b - a) < f64::EPSILON * (hi - lo).abs() {
            done.push((v, e));
        } else {
            let m = 0.5 * (a + b);
            stack.push((a, m, depth + 1));
            stack.push((m, b, depth + 1));
        }
    }
    let value: f64 = done.iter().map(|d| d.0).sum();
    let err: f64 = done.iter().map(|d| d.1).sum();
    (value, err)
}

/// Result of a semi-infinite integral with tail diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayingIntegral {
    /// Integral value over [0, cutoff].
    pub value: f64,
    /// Fraction contributed by the last (outermost) block — the convergence
    /// witness; rapidly decaying integrands drive this below any tolerance.
    pub tail_fraction: f64,
    /// Radius at which accumulation stopped.
    pub cutoff: f64,
}

/// Integrate a rapidly decaying `f` over [0, ∞).
///
/// Direct Gauss–Kronrod on [0, r_break], then geometric blocks in the
/// substituted variable ρ = r² until a block contributes less than
/// `tail_tol` of the running total (or the 10⁶ cutoff is hit, which callers
/// should treat as non-convergence via `tail_fraction`).
pub fn integrate_decaying(f: &dyn Fn(f64) -> f64, r_break: f64, tail_tol: f64) -> DecayingIntegral {
    let rb = r_break.max(1.0);
    let (mut total, _) = gk_integrate(f, 0.0, rb, 1e-11, 1e-300);
    // ∫ f(r) dr = ∫ f(√ρ)/(2√ρ) dρ on ρ ∈ [rb², ∞).
    let sub = |rho: f64| {
        let r = rho.sqrt();
        f(r) / (2.0 * r)
    };
    let mut rho_lo = rb * rb;
    let mut tail_fraction = f64::INFINITY;
    while rho_lo < 1e12 {
        let rho_hi = rho_lo * 2.0;
        let (block, _) = gk_integrate(&sub, rho_lo, rho_hi, 1e-11, 1e-300);
        total += block;
        tail_fraction = if total != 0.0 {
            (block / total).abs()
        } else {
            block.abs()
        };
        rho_lo = rho_hi;
        if tail_fraction < tail_tol {
            break;
        }
    }
    DecayingIntegral {
        value: total,
        tail_fraction,
        cutoff: rho_lo.sqrt(),
    }
}
