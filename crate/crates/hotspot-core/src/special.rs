//! Dimension- and exponent-dependent normalization constants.
//!
//! Everything here is a closed form in the Gamma function: the surface area
//! of the unit sphere, the constant-harmonic normalizations q\* and q_N, the
//! Gaussian-moment constant κ, and the tail normalization c_A of the
//! self-similar profile |y|^A e^{−|y|²/4}. They are tied together by the
//! identity κ·c_A² = |S^{N−1}|, which the tests pin down numerically.

use statrs::function::gamma::gamma;

/// Surface area of the unit sphere S^{N−1} ⊂ R^N: 2π^{N/2}/Γ(N/2).
pub fn sphere_area(n: u32) -> f64 {
    assert!(n >= 2, "dimension must be at least 2");
    let half = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(half) / gamma(half)
}

/// Normalization constants attached to the first two spherical harmonics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicConstants {
    /// |S^{N−1}|, surface area of the unit sphere.
    pub sphere_area: f64,
    /// q\* = |S^{N−1}|^{−1/2}; Q_{0,1} ≡ q\* is the normalized constant harmonic.
    pub q_star: f64,
    /// q_N = √N·q\*; Q_{1,i}(ω) = q_N·ω_i are the normalized degree-1 harmonics.
    pub q_n: f64,
}

/// Compute |S^{N−1}|, q\*, and q_N for dimension N ≥ 2.
pub fn harmonic_constants(n: u32) -> HarmonicConstants {
    let area = sphere_area(n);
    let q_star = area.powf(-0.5);
    HarmonicConstants {
        sphere_area: area,
        q_star,
        q_n: (n as f64).sqrt() * q_star,
    }
}

/// Gaussian moment constant κ = 2^{N+2A}·π^{N/2}·Γ((N+2A)/2)/Γ(N/2).
///
/// κ is the total weighted mass ∫ |y|^{2A} e^{−|y|²/4} dy of the self-similar
/// limit profile; it requires N + 2A > 0 (below that the defining integral
/// diverges and the Gamma factor hits a pole).
pub fn kappa_constant(n: u32, a: f64) -> Result<f64, String> {
    let s = n as f64 + 2.0 * a;
    if s <= 0.0 {
        return Err(format!(
            "kappa_constant requires N + 2A > 0; got N = {n}, A = {a} (N + 2A = {s})"
        ));
    }
    let nf = n as f64;
    Ok(2f64.powf(s) * std::f64::consts::PI.powf(nf / 2.0) * gamma(s / 2.0) / gamma(nf / 2.0))
}

/// Tail normalization c_A = [2^{N+2A−1}·Γ((N+2A)/2)]^{−1/2}.
///
/// c_A·r^A is the unit-norm radial tail in the weighted space
/// L²(r^{N−1}e^{r²/4}dr); the same formula with A replaced by the mode
/// exponent A_k gives the per-mode constants c_{A_k}. Requires N + 2A > 0.
pub fn c_a_constant(n: u32, a: f64) -> Result<f64, String> {
    let s = n as f64 + 2.0 * a;
    if s <= 0.0 {
        return Err(format!(
            "c_a_constant requires N + 2A > 0; got N = {n}, A = {a} (N + 2A = {s})"
        ));
    }
    Ok((2f64.powf(s - 1.0) * gamma(s / 2.0)).powf(-0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn sphere_areas_match_closed_forms() {
        // |S^1| = 2π, |S^2| = 4π, |S^3| = 2π².
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-13);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
    }

    #[test]
    fn q_constants() {
        for n in 2..=6 {
            let hc = harmonic_constants(n);
            assert!((hc.q_star - hc.sphere_area.powf(-0.5)).abs() < 1e-15);
            // q_N/q* = √N exactly.
            assert!(
                (hc.q_n / hc.q_star - (n as f64).sqrt()).abs() < 1e-14,
                "q_N/q* must be sqrt(N) for N = {n}"
            );
        }
        let hc2 = harmonic_constants(2);
        assert!((hc2.q_star - (2.0 * PI).powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn kappa_closed_forms() {
        // A = 0: the Gamma ratio collapses to 1, leaving 2^N π^{N/2}.
        for n in 2..=5 {
            let k = kappa_constant(n, 0.0).unwrap();
            let expect = 2f64.powi(n as i32) * PI.powf(n as f64 / 2.0);
            assert!(
                (k - expect).abs() < 1e-12 * expect,
                "kappa(N={n}, A=0) = {k}, expected {expect}"
            );
        }
        // N = 3, A = 1: 2^5 π^{3/2} Γ(5/2)/Γ(3/2) = 32·π^{3/2}·(3/2).
        let k = kappa_constant(3, 1.0).unwrap();
        let expect = 32.0 * PI.powf(1.5) * 1.5;
        assert!((k - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn kappa_rejects_gamma_pole() {
        assert!(kappa_constant(2, -1.0).is_err());
        assert!(kappa_constant(4, -2.5).is_err());
    }

    #[test]
    fn c_a_closed_form_and_identity() {
        // N = 2, A = 0: c_A = [2^1·Γ(1)]^{−1/2} = 2^{−1/2}.
        let c = c_a_constant(2, 0.0).unwrap();
        assert!((c - 0.5f64.sqrt()).abs() < 1e-15);

        // κ·c_A² = |S^{N−1}| ties the two normalizations together.
        for n in 2..=5 {
            for &a in &[-0.4, 0.0, 0.5, 1.0, 2.3] {
                let kappa = kappa_constant(n, a).unwrap();
                let ca = c_a_constant(n, a).unwrap();
                let area = sphere_area(n);
                assert!(
                    (kappa * ca * ca - area).abs() < 1e-12 * area,
                    "kappa·c_A² should equal |S^{{N-1}}| (N={n}, A={a})"
                );
            }
        }
    }
}
