//! Numerical laboratory for heat flow under radial inverse-square-type potentials.
//!
//! The crate studies the Cauchy problem
//!
//! ∂_t u − Δu + V(|x|)·u = 0  on  R^N × (0, ∞),   u(·, 0) = φ,
//!
//! where the radial potential V behaves like λ₁/r² near the origin and λ₂/r²
//! near infinity, with both coefficients at or above the Hardy threshold
//! λ\* = −(N−2)²/4. The long-time landscape of such solutions is governed by a
//! one-parameter family of positive "harmonic profiles" U_k (one per
//! spherical-harmonic degree k), and the set of spatial maximizers of u(·, t)
//! — the hot spot set — either escapes to infinity at a predictable rate or
//! converges to a computable limit point, depending on the tail exponent of
//! U₀ and on a handful of integral functionals of V.
//!
//! The crate is organized as a pipeline:
//!
//! * [`potential`] — potential families, the endpoint/regularity contract on
//!   V, and the exponent algebra A±(λ), ω_k.
//! * [`profile`] — singular ODE integration for the profiles U_k, asymptotic
//!   classification of the operator, and the derived functionals
//!   F_k, Γ_k, Λ, Π and S.
//! * [`sphere`] / [`spectral`] — real spherical harmonics, projection of
//!   initial data onto modes, and the moment functionals M(φ), Ξ(φ), M_{k,i}.
//! * [`evolve`] — conservative one-step (TR-BDF2) evolution of each mode in
//!   the w = u/U_k gauge, with a conserved-pairing ledger and reconstruction
//!   of u(x, t).
//! * [`hotspot`] — hot-spot location, trajectory fitting, the theoretical
//!   prediction per operator class, and empirical Gaussian-bound diagnostics.
//!
//! Supporting numerics (grids, quadrature, interpolation, tridiagonal solves,
//! Gamma-function constants) live in the remaining modules.

pub mod grid;
pub mod interp;
pub mod quad;
pub mod special;
pub mod tridiag;

pub mod potential;
pub mod profile;

pub mod sphere;
pub mod spectral;

pub mod evolve;
pub mod hotspot;
