//! Decomposition of initial data into spherical-harmonic modes and the
//! pairing scalars that drive hot-spot asymptotics.
//!
//! Initial data φ enters either as a sampled function (N = 2, 3) or as an
//! explicit mode list. Each kept degree k < m_max is reduced to radial
//! coefficient tables φ_{k,i}(r) = ∫ φ(rξ) Q_{k,i}(ξ) dσ(ξ). On top of the
//! tables sit the scalars the radius laws consume:
//!
//! * raw pairing ∫ φ U₀ dy and its normalization M(φ) = ∫φU₀ / (c\* κ),
//! * the plain first-moment vector ∫ φ(y) y_i dy (center of mass),
//! * the steering vector Ξ_i = ∫ φ(y) U₁(|y|) (y_i/|y|) dy, whose direction
//!   is the asymptotic hot-spot direction (it weights the data by the
//!   degree-1 profile, not by |y|; the two coincide exactly when U₁ = r),
//! * the degree-1 coefficients M_{1,i} = ∫ φ U₁ Q_{1,i} / (c₁ κ₁).

use rayon::prelude::*;

use crate::potential::PotentialSpec;
use crate::profile::HarmonicProfile;
use crate::quad::{cumulative, HeadRule};
use crate::special::{harmonic_constants, kappa_constant};
use crate::sphere::{eval_harmonic, mode_count, sphere_rule};

/// One radial coefficient table φ_{k,idx}(r).
#[derive(Debug, Clone)]
pub struct ModeComponent {
    pub k: u32,
    pub idx: usize,
    pub radial: Vec<f64>,
}

/// Full decomposition with the derived pairing scalars.
#[derive(Debug, Clone)]
pub struct ModeDecomposition {
    pub dimension: u32,
    /// Radial nodes shared by every component table.
    pub radii: Vec<f64>,
    /// Kept components, ordered by (k, idx), k < m_max.
    pub components: Vec<ModeComponent>,
    /// M(φ) = ∫ φ U₀ dy / (c\* κ(N, A)).
    pub m_phi: f64,
    /// ∫ φ U₀ dy without normalization.
    pub raw_pairing: f64,
    /// ∫ φ dy.
    pub total_integral: f64,
    /// Plain first moments ∫ φ(y) y_i dy (center of mass · total integral).
    pub xi: Vec<f64>,
    /// Profile-weighted moments Ξ_i = ∫ φ(y) U₁(|y|) (y_i/|y|) dy. This is
    /// the vector whose direction the hot spots select; it equals `xi` when
    /// U₁(r) = r (zero potential) and differs otherwise.
    pub xi_mode: Vec<f64>,
    /// Degree-1 pairings M_{1,i} = ∫ φ U₁ Q_{1,i} dy / (c₁ κ(N, A₁)).
    pub m_1: Vec<f64>,
    /// Fraction of the r^{N−1}-weighted L² mass outside the kept degrees
    /// (0 exactly for mode-list input).
    pub tail_norm: f64,
}

/// Errors from decomposition.
#[derive(Debug, Clone)]
pub enum SpectralError {
    /// Sampled-function input needs a sphere rule: N must be 2 or 3.
    UnsupportedDimension(u32),
    /// A required mode profile (k = 0 or 1) was not supplied.
    MissingProfile(u32),
    BadInput(String),
}

impl std::fmt::Display for SpectralError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SpectralError::UnsupportedDimension(n) => write!(
                f,
                "sampled-function decomposition needs N = 2 or 3, got N = {n}; \
                 supply a mode list instead"
            ),
            SpectralError::MissingProfile(k) => {
                write!(f, "decomposition needs the mode-{k} profile")
            }
            SpectralError::BadInput(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for SpectralError {}

/// Standard decomposition grid: 32 nodes/decade on [1e-6, 1], then uniform
/// spacing 0.02 out to max(50, r_out).
pub fn decomposition_grid(r_out: f64) -> Vec<f64> {
    let ppd = 32usize;
    let decades = 6;
    let mut r: Vec<f64> = (0..=decades * ppd)
        .map(|j| 1e-6 * 10f64.powf(j as f64 / ppd as f64))
        .collect();
    let h = 0.02;
    let r_end = r_out.max(50.0);
    let mut m = 1usize;
    loop {
        let x = 1.0 + h * m as f64;
        r.push(x);
        if x >= r_end {
            break;
        }
        m += 1;
    }
    r
}

fn find_profile<'a>(
    profiles: &'a [HarmonicProfile],
    k: u32,
) -> Result<&'a HarmonicProfile, SpectralError> {
    profiles
        .iter()
        .find(|p| p.k == k)
        .ok_or(SpectralError::MissingProfile(k))
}

/// Decompose sampled initial data into modes k < m_max.
///
/// `support_radius` bounds where φ is numerically nonzero; the radial grid
/// extends to at least that radius (and at least to 50). Needs the k = 0
/// and k = 1 profiles for the pairing scalars.
pub fn decompose(
    spec: &PotentialSpec,
    profiles: &[HarmonicProfile],
    phi: &(dyn Fn(&[f64]) -> f64 + Sync),
    support_radius: f64,
    m_max: u32,
) -> Result<ModeDecomposition, SpectralError> {
    let n = spec.dimension;
    if m_max < 2 {
        return Err(SpectralError::BadInput(
            "decomposition keeps at least degrees 0 and 1 (m_max >= 2)".into(),
        ));
    }
    let rule = sphere_rule(n).ok_or(SpectralError::UnsupportedDimension(n))?;
    let radii = decomposition_grid(support_radius);

    // Harmonic values at the quadrature points, one row per kept component.
    let mut index: Vec<(u32, usize)> = Vec::new();
    for k in 0..m_max {
        for idx in 0..mode_count(n, k) {
            index.push((k, idx));
        }
    }
    let q_rows: Vec<Vec<f64>> = index
        .iter()
        .map(|&(k, idx)| {
            rule.points
                .iter()
                .map(|p| eval_harmonic(n, k, idx, p))
                .collect()
        })
        .collect();

    // Project φ at every radius: coefficient rows plus the square mass.
    let rows: Vec<(Vec<f64>, f64)> = radii
        .par_iter()
        .map(|&r| {
            let samples: Vec<f64> = rule
                .points
                .iter()
                .map(|p| {
                    let x: Vec<f64> = p.iter().map(|&c| c * r).collect();
                    phi(&x)
                })
                .collect();
            let coeffs: Vec<f64> = q_rows
                .iter()
                .map(|qr| {
                    samples
                        .iter()
                        .zip(qr.iter().zip(&rule.weights))
                        .map(|(&s, (&q, &w))| w * s * q)
                        .sum()
                })
                .collect();
            let sq: f64 = samples
                .iter()
                .zip(&rule.weights)
                .map(|(&s, &w)| w * s * s)
                .sum();
            (coeffs, sq)
        })
        .collect();

    let components: Vec<ModeComponent> = index
        .iter()
        .enumerate()
        .map(|(row, &(k, idx))| ModeComponent {
            k,
            idx,
            radial: rows.iter().map(|(c, _)| c[row]).collect(),
        })
        .collect();

    // Parseval defect: weighted mass outside the kept degrees.
    let nf = n as f64;
    let full_sq: Vec<f64> = radii
        .iter()
        .zip(&rows)
        .map(|(&r, (_, sq))| r.powf(nf - 1.0) * sq)
        .collect();
    let kept_sq: Vec<f64> = radii
        .iter()
        .zip(&rows)
        .map(|(&r, (c, _))| r.powf(nf - 1.0) * c.iter().map(|v| v * v).sum::<f64>())
        .collect();
    let total_sq = *cumulative(&radii, &full_sq, HeadRule::PowerLaw).last().unwrap();
    let kept_total = *cumulative(&radii, &kept_sq, HeadRule::PowerLaw).last().unwrap();
    let tail_norm = if total_sq > 0.0 {
        ((total_sq - kept_total) / total_sq).max(0.0)
    } else {
        0.0
    };

    finish_decomposition(spec, profiles, radii, components, tail_norm)
}

/// Build a decomposition from explicit mode tables (any dimension).
pub fn decomposition_from_modes(
    spec: &PotentialSpec,
    profiles: &[HarmonicProfile],
    radii: Vec<f64>,
    components: Vec<ModeComponent>,
) -> Result<ModeDecomposition, SpectralError> {
    if radii.len() < 8 || !radii.windows(2).all(|w| w[1] > w[0]) {
        return Err(SpectralError::BadInput(
            "mode tables need at least 8 strictly increasing radii".into(),
        ));
    }
    for c in &components {
        if c.radial.len() != radii.len() {
            return Err(SpectralError::BadInput(format!(
                "mode (k={}, idx={}) table length {} != grid length {}",
                c.k,
                c.idx,
                c.radial.len(),
                radii.len()
            )));
        }
        if c.idx >= mode_count(spec.dimension, c.k) {
            return Err(SpectralError::BadInput(format!(
                "mode index {} out of range for degree {} in dimension {}",
                c.idx, c.k, spec.dimension
            )));
        }
    }
    finish_decomposition(spec, profiles, radii, components, 0.0)
}

/// Compute the pairing scalars shared by both input paths.
fn finish_decomposition(
    spec: &PotentialSpec,
    profiles: &[HarmonicProfile],
    radii: Vec<f64>,
    components: Vec<ModeComponent>,
    tail_norm: f64,
) -> Result<ModeDecomposition, SpectralError> {
    let n = spec.dimension;
    let nf = n as f64;
    let hc = harmonic_constants(n);
    let p0 = find_profile(profiles, 0)?;
    let p1 = find_profile(profiles, 1)?;

    let integral_of = |f: &dyn Fn(usize, f64) -> f64| -> f64 {
        let vals: Vec<f64> = radii.iter().enumerate().map(|(i, &r)| f(i, r)).collect();
        *cumulative(&radii, &vals, HeadRule::PowerLaw).last().unwrap()
    };

    let comp0 = components
        .iter()
        .find(|c| c.k == 0)
        .ok_or(SpectralError::BadInput("missing degree-0 component".into()))?;
    // ∫φ U₀ dy = ∫ r^{N−1} U₀(r) (φ₀(r)/q*) dr.
    let raw_pairing = integral_of(&|i, r| {
        r.powf(nf - 1.0) * p0.eval(r) * comp0.radial[i] / hc.q_star
    });
    let total_integral =
        integral_of(&|i, r| r.powf(nf - 1.0) * comp0.radial[i] / hc.q_star);

    let kappa0 = kappa_constant(n, p0.a_infinity)
        .map_err(SpectralError::BadInput)?;
    let m_phi = raw_pairing / (p0.c_infinity * kappa0);

    // Degree-1 block in coordinate order.
    let kappa1 = kappa_constant(n, p1.a_infinity)
        .map_err(SpectralError::BadInput)?;
    let mut xi = vec![0.0; n as usize];
    let mut xi_mode = vec![0.0; n as usize];
    let mut m_1 = vec![0.0; n as usize];
    for c in components.iter().filter(|c| c.k == 1) {
        // Plain moment: ∫ r^N (φ_{1,i}/q_N) dr.
        xi[c.idx] = integral_of(&|i, r| r.powf(nf) * c.radial[i] / hc.q_n);
        // Ξ_i = ∫ r^{N−1} U₁ (φ_{1,i}/q_N) dr.
        xi_mode[c.idx] =
            integral_of(&|i, r| r.powf(nf - 1.0) * p1.eval(r) * c.radial[i] / hc.q_n);
        // M_{1,i} = ∫ r^{N−1} U₁ φ_{1,i} dr / (c₁ κ₁).
        m_1[c.idx] = integral_of(&|i, r| r.powf(nf - 1.0) * p1.eval(r) * c.radial[i])
            / (p1.c_infinity * kappa1);
    }

    Ok(ModeDecomposition {
        dimension: n,
        radii,
        components,
        m_phi,
        raw_pairing,
        total_integral,
        xi,
        xi_mode,
        m_1,
        tail_norm,
    })
}

impl ModeDecomposition {
    /// Linear interpolation of component `i`'s radial table; clamps to the
    /// first node toward the origin and returns 0 beyond the grid.
    pub fn component_at(&self, i: usize, r: f64) -> f64 {
        let table = &self.components[i].radial;
        let rs = &self.radii;
        if r <= rs[0] {
            return table[0];
        }
        if r >= *rs.last().unwrap() {
            return 0.0;
        }
        let j = rs.partition_point(|&x| x <= r) - 1;
        let t = (r - rs[j]) / (rs[j + 1] - rs[j]);
        table[j] * (1.0 - t) + table[j + 1] * t
    }

    /// Norm of the plain first moment.
    pub fn xi_norm(&self) -> f64 {
        self.xi.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// |Ξ| for the profile-weighted steering vector.
    pub fn xi_mode_norm(&self) -> f64 {
        self.xi_mode.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Unit steering direction Ξ/|Ξ| (None when Ξ vanishes numerically).
    pub fn steering_direction(&self) -> Option<Vec<f64>> {
        let norm = self.xi_mode_norm();
        if norm < 1e-12 * (1.0 + self.raw_pairing.abs()) {
            return None;
        }
        Some(self.xi_mode.iter().map(|&v| v / norm).collect())
    }

    /// Center of mass Ξ/∫φ (None when the total integral vanishes).
    pub fn center_of_mass(&self) -> Option<Vec<f64>> {
        if self.total_integral.abs() < 1e-300 {
            return None;
        }
        Some(self.xi.iter().map(|&v| v / self.total_integral).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profile::solve_profile;

    fn profiles_for(spec: &PotentialSpec, r_max: f64) -> Vec<HarmonicProfile> {
        (0..3)
            .map(|k| solve_profile(spec, k, r_max).unwrap())
            .collect()
    }

    /// By hand: for V = 2/r² in N = 3, U₀ = r, c\* = 1, κ(3,1) = 48π^{3/2},
    /// and ∫ e^{−|y|²/4} |y| dy = 32π, so M(φ) = 32π/(48π^{3/2}) = 2/(3√π).
    const M_PHI_INVERSE_SQUARE_GAUSSIAN: f64 = 0.376_126_389_031_837_54;

    #[test]
    fn pairing_matches_hand_derived_value() {
        let spec = PotentialSpec::hardy(3, 2.0).unwrap();
        let profiles = profiles_for(&spec, 1e3);
        let d = decompose(
            &spec,
            &profiles,
            &|x: &[f64]| (-x.iter().map(|v| v * v).sum::<f64>() / 4.0).exp(),
            40.0,
            3,
        )
        .unwrap();
        let rel = (d.m_phi - M_PHI_INVERSE_SQUARE_GAUSSIAN).abs() / M_PHI_INVERSE_SQUARE_GAUSSIAN;
        println!("M(phi) = {:.12e} (rel dev {rel:.2e})", d.m_phi);
        assert!(rel < 1e-6);
        // Radial data has no degree-1 content.
        assert!(d.xi_norm() < 1e-12);
        assert!(d.xi_mode_norm() < 1e-12);
        assert!(d.m_1.iter().all(|v| v.abs() < 1e-12));
        assert!(d.steering_direction().is_none());
    }

    #[test]
    fn gaussian_moments_are_exact() {
        // ∫ e^{−|x−p|²/4} dx = (4π)^{3/2}; first moment p · the same.
        let p = [0.5, -0.3, 0.8];
        let spec = PotentialSpec::zero(3);
        let profiles = profiles_for(&spec, 1e3);
        let d = decompose(
            &spec,
            &profiles,
            &|x: &[f64]| {
                (-(x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()) / 4.0).exp()
            },
            40.0,
            3,
        )
        .unwrap();
        // The radial rule (spacing 0.02) carries ~1e-8 relative error; hold
        // the moments to 1e-7, far below what the radius laws resolve.
        let mass = (4.0 * std::f64::consts::PI).powf(1.5);
        assert!((d.total_integral - mass).abs() < 1e-7 * mass);
        for i in 0..3 {
            assert!(
                (d.xi[i] - p[i] * mass).abs() < 1e-7 * mass,
                "xi[{i}] = {} vs {}",
                d.xi[i],
                p[i] * mass
            );
        }
        let com = d.center_of_mass().unwrap();
        for i in 0..3 {
            assert!((com[i] - p[i]).abs() < 1e-7);
        }
        // Zero potential: the raw pairing is the plain integral.
        assert!((d.raw_pairing - d.total_integral).abs() < 1e-10 * mass);
    }

    #[test]
    fn degree_one_pairing_proportional_to_moment() {
        // Zero potential, N = 3: U₁ = r, c₁ = 1, so
        // M_{1,i} = q_N Ξ_i / κ(3, 1).
        let p = [0.4, 0.1, -0.6];
        let spec = PotentialSpec::zero(3);
        let profiles = profiles_for(&spec, 1e3);
        let d = decompose(
            &spec,
            &profiles,
            &|x: &[f64]| {
                (-(x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()) / 4.0).exp()
            },
            40.0,
            3,
        )
        .unwrap();
        let q3 = harmonic_constants(3).q_n;
        let kappa1 = kappa_constant(3, 1.0).unwrap();
        for i in 0..3 {
            let expect = q3 * d.xi[i] / kappa1;
            assert!(
                (d.m_1[i] - expect).abs() < 1e-8 * expect.abs().max(1e-8),
                "m_1[{i}] = {} vs {expect}",
                d.m_1[i]
            );
            // U₁ = r makes the profile-weighted moment the plain one.
            assert!(
                (d.xi_mode[i] - d.xi[i]).abs() < 1e-8 * d.xi_norm(),
                "xi_mode[{i}] = {} vs xi = {}",
                d.xi_mode[i],
                d.xi[i]
            );
        }
    }

    #[test]
    fn profile_weight_changes_moment_magnitude_not_direction() {
        // Inverse-square potential: U₁ = r^{(−1+√17)/2} ≠ r, so Ξ keeps the
        // symmetry axis of the data but rescales against the plain moment.
        let spec = PotentialSpec::hardy(3, 2.0).unwrap();
        let profiles = profiles_for(&spec, 1e3);
        let p = [0.8, 0.0, 0.0];
        let d = decompose(
            &spec,
            &profiles,
            &|x: &[f64]| {
                (-(x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()) / 4.0).exp()
            },
            40.0,
            3,
        )
        .unwrap();
        assert!(d.xi_mode[0] > 0.0);
        assert!(d.xi_mode[1].abs() < 1e-9 * d.xi_mode[0]);
        assert!(d.xi_mode[2].abs() < 1e-9 * d.xi_mode[0]);
        let dir = d.steering_direction().unwrap();
        assert!((dir[0] - 1.0).abs() < 1e-9);
        let ratio = d.xi_mode[0] / d.xi[0];
        println!("profile-weighted / plain moment = {ratio:.6}");
        assert!((ratio - 1.0).abs() > 0.05, "weights should differ, ratio {ratio}");
    }

    #[test]
    fn linearity_of_components() {
        let spec = PotentialSpec::zero(2);
        let profiles = profiles_for(&spec, 1e3);
        let f = |x: &[f64]| (-(x[0] - 0.7) * (x[0] - 0.7) / 4.0 - x[1] * x[1] / 4.0).exp();
        let g = |x: &[f64]| (-(x[0] * x[0] + (x[1] + 0.4) * (x[1] + 0.4)) / 2.0).exp();
        let combined = |x: &[f64]| 2.0 * f(x) - 0.5 * g(x);
        let df = decompose(&spec, &profiles, &f, 40.0, 3).unwrap();
        let dg = decompose(&spec, &profiles, &g, 40.0, 3).unwrap();
        let dc = decompose(&spec, &profiles, &combined, 40.0, 3).unwrap();
        for (i, c) in dc.components.iter().enumerate() {
            for j in (0..c.radial.len()).step_by(97) {
                let expect = 2.0 * df.components[i].radial[j] - 0.5 * dg.components[i].radial[j];
                assert!(
                    (c.radial[j] - expect).abs() < 1e-10,
                    "component {i} node {j}"
                );
            }
        }
        let m_expect = 2.0 * df.m_phi - 0.5 * dg.m_phi;
        assert!((dc.m_phi - m_expect).abs() < 1e-10);
    }

    #[test]
    fn rotation_equivariance_of_moments() {
        // Rotating the data rotates Ξ and leaves M(φ) unchanged.
        let spec = PotentialSpec::zero(3);
        let profiles = profiles_for(&spec, 1e3);
        let p = [0.9, 0.2, -0.4];
        let alpha = 0.7f64;
        let (ca, sa) = (alpha.cos(), alpha.sin());
        let phi = |x: &[f64]| {
            (-(x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>()) / 4.0).exp()
        };
        // φ_R(x) = φ(R^T x) for the rotation R about the z-axis.
        let phi_rot = |x: &[f64]| {
            let y = [ca * x[0] + sa * x[1], -sa * x[0] + ca * x[1], x[2]];
            phi(&y)
        };
        let d = decompose(&spec, &profiles, &phi, 40.0, 3).unwrap();
        let dr = decompose(&spec, &profiles, &phi_rot, 40.0, 3).unwrap();
        let expect = [
            ca * d.xi[0] - sa * d.xi[1],
            sa * d.xi[0] + ca * d.xi[1],
            d.xi[2],
        ];
        for i in 0..3 {
            assert!(
                (dr.xi[i] - expect[i]).abs() < 1e-7 * d.xi_norm(),
                "rotated xi[{i}] = {} vs {}",
                dr.xi[i],
                expect[i]
            );
        }
        assert!((dr.m_phi - d.m_phi).abs() < 1e-10 * d.m_phi.abs());
    }

    #[test]
    fn parseval_tail_detects_truncation() {
        // Band-limited data: degrees 0, 1, 2 only.
        let spec = PotentialSpec::zero(3);
        let profiles = profiles_for(&spec, 1e3);
        let phi = |x: &[f64]| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            let r = r2.sqrt();
            let g = (-r2 / 2.0).exp();
            if r < 1e-300 {
                return g;
            }
            let xi = [x[0] / r, x[1] / r, x[2] / r];
            g * (1.0
                + 0.5 * eval_harmonic(3, 1, 2, &xi)
                + 0.25 * eval_harmonic(3, 2, 3, &xi))
        };
        // Keeping k < 3 captures everything.
        let d3 = decompose(&spec, &profiles, &phi, 40.0, 3).unwrap();
        println!("tail_norm (complete) = {:.3e}", d3.tail_norm);
        assert!(d3.tail_norm < 1e-10);
        // Keeping k < 2 leaves exactly the degree-2 share. With radial
        // factor g shared by all pieces, the share is the coefficient-square
        // ratio: 0.25²/(1² + 0.5² + 0.25²).
        let d2 = decompose(&spec, &profiles, &phi, 40.0, 2).unwrap();
        // The constant part 1 carries ∫1 dσ = |S²| of square mass, the
        // harmonic parts carry their squared coefficients.
        let share = 0.0625 / (4.0 * std::f64::consts::PI + 0.25 + 0.0625);
        println!("tail_norm (truncated) = {:.6e} vs {share:.6e}", d2.tail_norm);
        assert!((d2.tail_norm - share).abs() < 1e-6);
    }

    #[test]
    fn planar_component_extraction() {
        // φ = g(r) cos(2θ) in N = 2: the (2, cos) coefficient is g·√π.
        let spec = PotentialSpec::zero(2);
        let profiles = profiles_for(&spec, 1e3);
        let phi = |x: &[f64]| {
            let r2 = x[0] * x[0] + x[1] * x[1];
            let th = x[1].atan2(x[0]);
            (-r2 / 4.0).exp() * (2.0 * th).cos()
        };
        let d = decompose(&spec, &profiles, &phi, 40.0, 3).unwrap();
        let c2 = d
            .components
            .iter()
            .find(|c| c.k == 2 && c.idx == 0)
            .unwrap();
        let sqrt_pi = std::f64::consts::PI.sqrt();
        for (j, &r) in d.radii.iter().enumerate().step_by(211) {
            let expect = (-r * r / 4.0).exp() * sqrt_pi;
            assert!(
                (c2.radial[j] - expect).abs() < 1e-12 + 1e-10 * expect.abs(),
                "at r = {r}: {} vs {expect}",
                c2.radial[j]
            );
        }
        // Everything else vanishes.
        for c in d.components.iter().filter(|c| !(c.k == 2 && c.idx == 0)) {
            assert!(c.radial.iter().all(|v| v.abs() < 1e-12));
        }
    }

    #[test]
    fn mode_list_input_reproduces_pairing() {
        let spec = PotentialSpec::hardy(3, 2.0).unwrap();
        let profiles = profiles_for(&spec, 1e3);
        let radii = decomposition_grid(40.0);
        let q_star = harmonic_constants(3).q_star;
        // For φ(x) = e^{−r²/4}: φ₀(r) = ∫φ Q₀ dσ = e^{−r²/4} q* |S²|.
        let comp = ModeComponent {
            k: 0,
            idx: 0,
            radial: radii
                .iter()
                .map(|&r| (-r * r / 4.0).exp() * q_star * crate::special::sphere_area(3))
                .collect(),
        };
        let zero1 = ModeComponent {
            k: 1,
            idx: 0,
            radial: vec![0.0; radii.len()],
        };
        let d = decomposition_from_modes(&spec, &profiles, radii, vec![comp, zero1]).unwrap();
        let rel = (d.m_phi - M_PHI_INVERSE_SQUARE_GAUSSIAN).abs() / M_PHI_INVERSE_SQUARE_GAUSSIAN;
        println!("mode-list M(phi) = {:.12e} (rel {rel:.2e})", d.m_phi);
        assert!(rel < 1e-6);
        assert_eq!(d.tail_norm, 0.0);
    }

    #[test]
    fn unsupported_dimension_needs_mode_list() {
        let spec = PotentialSpec::zero(4);
        let profiles = profiles_for(&spec, 1e3);
        let err = decompose(&spec, &profiles, &|_x: &[f64]| 1.0, 10.0, 3).unwrap_err();
        match err {
            SpectralError::UnsupportedDimension(4) => {}
            other => panic!("unexpected error {other:?}"),
        }
    }
}
