//! Spherical harmonics and quadrature on S^{N−1}.
//!
//! Real orthonormal harmonics Q_{k,i} (∫ Q² dσ = 1) with the degree-1
//! family in coordinate order, Q_{1,i}(ξ) = q_N ξ_i, so that first-moment
//! vectors read off componentwise. Quadrature rules integrate polynomials
//! far beyond the degree range used here: a 256-point trapezoid on S¹ and a
//! 48-node Gauss–Legendre × 96-point azimuth product rule on S².

use crate::special::harmonic_constants;

/// Nodes and weights of the n-point Gauss–Legendre rule on [−1, 1],
/// via Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Chebyshev-style initial guess for the i-th root.
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_deriv(n, z);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_deriv(n, z);
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// P_n(x) and P_n′(x) by the three-term recurrence.
fn legendre_with_deriv(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// A quadrature rule on the unit sphere S^{N−1}: unit vectors and weights
/// summing to the sphere area.
#[derive(Debug, Clone)]
pub struct SphereRule {
    pub dimension: u32,
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

/// Build the standard rule. Supported for N = 2 (trapezoid in angle, exact
/// for trigonometric polynomials of degree < 256) and N = 3 (Gauss–Legendre
/// in the polar cosine × uniform azimuth, exact for harmonics of degree
/// ≤ 47). Higher dimensions take mode-list input instead of sampled
/// functions.
pub fn sphere_rule(n: u32) -> Option<SphereRule> {
    match n {
        2 => {
            let m = 256usize;
            let w = 2.0 * std::f64::consts::PI / m as f64;
            let mut points = Vec::with_capacity(m);
            for j in 0..m {
                let th = 2.0 * std::f64::consts::PI * j as f64 / m as f64;
                points.push(vec![th.cos(), th.sin()]);
            }
            Some(SphereRule {
                dimension: 2,
                points,
                weights: vec![w; m],
            })
        }
        3 => {
            let (ct, cw) = gauss_legendre(48);
            let m_az = 96usize;
            let waz = 2.0 * std::f64::consts::PI / m_az as f64;
            let mut points = Vec::with_capacity(ct.len() * m_az);
            let mut weights = Vec::with_capacity(ct.len() * m_az);
            for (z, wz) in ct.iter().zip(&cw) {
                let s = (1.0 - z * z).max(0.0).sqrt();
                for j in 0..m_az {
                    let ph = 2.0 * std::f64::consts::PI * j as f64 / m_az as f64;
                    points.push(vec![s * ph.cos(), s * ph.sin(), *z]);
                    weights.push(wz * waz);
                }
            }
            Some(SphereRule {
                dimension: 3,
                points,
                weights,
            })
        }
        _ => None,
    }
}

/// Dimension of the space of degree-k spherical harmonics on S^{N−1}.
pub fn mode_count(n: u32, k: u32) -> usize {
    if k == 0 {
        return 1;
    }
    match n {
        2 => 2,
        3 => (2 * k + 1) as usize,
        _ => {
            let c = |top: u32, bot: u32| -> usize {
                if top < bot {
                    return 0;
                }
                let mut acc = 1usize;
                for j in 0..bot {
                    acc = acc * (top - j) as usize / (j + 1) as usize;
                }
                acc
            };
            let full = c(n + k - 1, k);
            let lower = if k >= 2 { c(n + k - 3, k - 2) } else { 0 };
            full - lower
        }
    }
}

/// Associated Legendre P_l^m(x) without the Condon–Shortley phase:
/// P_m^m = (2m−1)!! (1−x²)^{m/2}, then the upward l-recurrence.
fn assoc_legendre(l: u32, m: u32, x: f64) -> f64 {
    debug_assert!(m <= l);
    let mut pmm = 1.0;
    let sine = ((1.0 - x) * (1.0 + x)).max(0.0).sqrt();
    let mut odd = 1.0;
    for _ in 0..m {
        pmm *= odd * sine;
        odd += 2.0;
    }
    if l == m {
        return pmm;
    }
    let mf = m as f64;
    let mut pm1 = x * (2.0 * mf + 1.0) * pmm;
    if l == m + 1 {
        return pm1;
    }
    let mut pl = 0.0;
    for ll in (m + 2)..=l {
        let lf = ll as f64;
        pl = (x * (2.0 * lf - 1.0) * pm1 - (lf + mf - 1.0) * pmm) / (lf - mf);
        pmm = pm1;
        pm1 = pl;
    }
    pl
}

fn factorial(n: u32) -> f64 {
    (1..=n).map(|j| j as f64).product()
}

/// Evaluate the real orthonormal harmonic Q_{k,idx} at a unit vector.
///
/// Conventions: k = 0 is the constant q\* = |S^{N−1}|^{−1/2}; k = 1 is in
/// coordinate order, Q_{1,i}(ξ) = q_N ξ_i for i = 0..N. For k ≥ 2:
/// N = 2 alternates cos(kθ)/√π, sin(kθ)/√π; N = 3 enumerates m = 0, then
/// (m, cos), (m, sin) for m = 1..k, supported through k = 4.
pub fn eval_harmonic(n: u32, k: u32, idx: usize, point: &[f64]) -> f64 {
    assert_eq!(point.len(), n as usize);
    assert!(idx < mode_count(n, k), "harmonic index out of range");
    let hc = harmonic_constants(n);
    if k == 0 {
        return hc.q_star;
    }
    if k == 1 {
        return hc.q_n * point[idx];
    }
    match n {
        2 => {
            let th = point[1].atan2(point[0]);
            let kf = k as f64;
            let norm = 1.0 / std::f64::consts::PI.sqrt();
            if idx == 0 {
                norm * (kf * th).cos()
            } else {
                norm * (kf * th).sin()
            }
        }
        3 => {
            assert!(k <= 4, "3-D harmonics tabulated through degree 4");
            let ct = point[2].clamp(-1.0, 1.0);
            let az = point[1].atan2(point[0]);
            let (m, is_sin) = if idx == 0 {
                (0u32, false)
            } else {
                (((idx + 1) / 2) as u32, idx % 2 == 0)
            };
            let lf = k as f64;
            let mut norm =
                ((2.0 * lf + 1.0) / (4.0 * std::f64::consts::PI) * factorial(k - m)
                    / factorial(k + m))
                .sqrt();
            if m > 0 {
                norm *= 2f64.sqrt();
            }
            let plm = assoc_legendre(k, m, ct);
            let mf = m as f64;
            let angular = if m == 0 {
                1.0
            } else if is_sin {
                (mf * az).sin()
            } else {
                (mf * az).cos()
            };
            norm * plm * angular
        }
        _ => panic!("sampled harmonics of degree >= 2 need N = 2 or 3"),
    }
}
