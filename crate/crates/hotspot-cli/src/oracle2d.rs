//! Independent planar solver on a polar grid.
//!
//! The mode pipeline evolves one radial equation per spherical-harmonic
//! component and reassembles u(x, t). This module solves the same problem
//!
//! ∂_t u = (1/r)(r u_r)_r + u_θθ/r² − V(r) u
//!
//! directly on an (r, θ) grid with an alternating-direction implicit
//! scheme, sharing no discretization machinery with the pipeline, so the
//! two can be compared field-against-field.
//!
//! Half-step one treats the radial operator (with the potential) implicitly
//! and the angular operator explicitly; half-step two swaps them. Radial
//! lines are plain tridiagonal solves; angular rings are periodic
//! tridiagonal systems, reduced to two plain solves by a rank-one
//! correction.

use hotspot_core::tridiag::thomas_solve;
use rayon::prelude::*;

/// Snapshot of the polar field at one time.
#[derive(Debug, Clone)]
pub struct PolarField {
    pub t: f64,
    /// Cell-center radii, length m_r.
    pub r_centers: Vec<f64>,
    /// Angles, length m_theta (uniform, starting at 0).
    pub thetas: Vec<f64>,
    /// Row-major values\[i·m_r + j\] at (θ_i, r_j).
    pub values: Vec<f64>,
}

impl PolarField {
    pub fn value(&self, i_theta: usize, j_r: usize) -> f64 {
        self.values[i_theta * self.r_centers.len() + j_r]
    }
}

#[derive(Debug, Clone)]
pub struct PolarSettings {
    pub r_max: f64,
    pub radial_cells: usize,
    pub angular_cells: usize,
    pub dt: f64,
}

impl Default for PolarSettings {
    fn default() -> Self {
        PolarSettings {
            r_max: 30.0,
            radial_cells: 1024,
            angular_cells: 96,
            dt: 2.5e-3,
        }
    }
}

/// Solve a cyclic tridiagonal system with constant off-diagonal `off`,
/// diagonal `dia`, and right-hand side `rhs` (length ≥ 3), by the
/// rank-one (corner) correction over two Thomas solves.
fn cyclic_solve(off: f64, dia: &[f64], rhs: &mut [f64]) {
    let m = dia.len();
    let gamma = -dia[0];
    let sub = vec![off; m];
    let sup = vec![off; m];
    let mut d1: Vec<f64> = dia.to_vec();
    d1[0] -= gamma;
    d1[m - 1] -= off * off / gamma;

    let mut u = vec![0.0; m];
    u[0] = gamma;
    u[m - 1] = off;

    let mut dia_y = d1.clone();
    thomas_solve(&sub, &mut dia_y, &sup, rhs).expect("angular ring solve is dominant");
    let mut dia_z = d1;
    thomas_solve(&sub, &mut dia_z, &sup, &mut u).expect("angular ring solve is dominant");

    let factor = (rhs[0] + off / gamma * rhs[m - 1])
        / (1.0 + u[0] + off / gamma * u[m - 1]);
    for i in 0..m {
        rhs[i] -= factor * u[i];
    }
}

/// Evolve φ(r, θ) through the record times. `potential` is V(r); the
/// outer boundary is absorbing (u = 0 at r_max), so the domain must be
/// chosen large enough that the solution has not reached it.
pub fn solve_polar(
    potential: &(dyn Fn(f64) -> f64 + Sync),
    phi: &(dyn Fn(f64, f64) -> f64 + Sync),
    record_times: &[f64],
    settings: &PolarSettings,
) -> Vec<PolarField> {
    let m_r = settings.radial_cells;
    let m_t = settings.angular_cells;
    assert!(m_r >= 8 && m_t >= 8, "grid too coarse to mean anything");
    assert!(
        record_times.windows(2).all(|w| w[1] > w[0])
            && record_times.first().map(|&t| t > 0.0).unwrap_or(false),
        "record times must be positive and strictly increasing"
    );
    let h = settings.r_max / m_r as f64;
    let dth = 2.0 * std::f64::consts::PI / m_t as f64;
    let r_centers: Vec<f64> = (0..m_r).map(|j| (j as f64 + 0.5) * h).collect();
    let thetas: Vec<f64> = (0..m_t).map(|i| i as f64 * dth).collect();
    let v_at: Vec<f64> = r_centers.iter().map(|&r| potential(r)).collect();

    // Radial flux coefficients: (1/(r_j h²))·[r_{j+1/2}(u_{j+1}−u_j) − r_{j−1/2}(u_j−u_{j−1})].
    // The inner edge of cell 0 sits at r = 0 where the flux vanishes; the
    // outer boundary is Dirichlet via a ghost value −u_{m−1}.
    let mut low = vec![0.0; m_r];
    let mut upp = vec![0.0; m_r];
    let mut cen = vec![0.0; m_r];
    for j in 0..m_r {
        let r_j = r_centers[j];
        let edge_lo = j as f64 * h;
        let edge_hi = (j + 1) as f64 * h;
        let c_lo = edge_lo / (r_j * h * h);
        let c_hi = edge_hi / (r_j * h * h);
        low[j] = c_lo;
        upp[j] = if j + 1 < m_r { c_hi } else { 0.0 };
        // Ghost closure: u_ghost = −u_{m−1} makes the last cell see −2c_hi.
        cen[j] = if j + 1 < m_r {
            -(c_lo + c_hi)
        } else {
            -(c_lo + 2.0 * c_hi)
        };
    }

    let mut u: Vec<f64> = (0..m_t * m_r)
        .map(|n| phi(r_centers[n % m_r], thetas[n / m_r]))
        .collect();

    let mut out = Vec::with_capacity(record_times.len());
    let mut t = 0.0f64;
    for &target in record_times {
        let span = target - t;
        let steps = (span / settings.dt).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        for _ in 0..steps {
            u = adi_step(
                &u, m_r, m_t, dt, dth, &r_centers, &v_at, &low, &upp, &cen,
            );
        }
        t = target;
        out.push(PolarField {
            t,
            r_centers: r_centers.clone(),
            thetas: thetas.clone(),
            values: u.clone(),
        });
    }
    out
}

/// One alternating-direction step of length dt.
#[allow(clippy::too_many_arguments)]
fn adi_step(
    u: &[f64],
    m_r: usize,
    m_t: usize,
    dt: f64,
    dth: f64,
    r_centers: &[f64],
    v_at: &[f64],
    low: &[f64],
    upp: &[f64],
    cen: &[f64],
) -> Vec<f64> {
    let half = 0.5 * dt;
    // Angular second-difference scale per ring.
    let ang: Vec<f64> = r_centers
        .iter()
        .map(|&r| 1.0 / (r * r * dth * dth))
        .collect();

    // Half-step 1: implicit radial (+potential), explicit angular.
    let star: Vec<Vec<f64>> = (0..m_t)
        .into_par_iter()
        .map(|i| {
            let ip = (i + 1) % m_t;
            let im = (i + m_t - 1) % m_t;
            let mut rhs: Vec<f64> = (0..m_r)
                .map(|j| {
                    let lap_t =
                        ang[j] * (u[ip * m_r + j] - 2.0 * u[i * m_r + j] + u[im * m_r + j]);
                    u[i * m_r + j] + half * lap_t
                })
                .collect();
            let sub: Vec<f64> = (0..m_r).map(|j| -half * low[j]).collect();
            let sup: Vec<f64> = (0..m_r).map(|j| -half * upp[j]).collect();
            let mut dia: Vec<f64> = (0..m_r)
                .map(|j| 1.0 - half * (cen[j] - v_at[j]))
                .collect();
            thomas_solve(&sub, &mut dia, &sup, &mut rhs)
                .expect("radial line solve is dominant");
            rhs
        })
        .collect();

    // Half-step 2: implicit angular, explicit radial (+potential).
    let columns: Vec<Vec<f64>> = (0..m_r)
        .into_par_iter()
        .map(|j| {
            let mut rhs: Vec<f64> = (0..m_t)
                .map(|i| {
                    let s = &star;
                    let up = if j + 1 < m_r { s[i][j + 1] } else { -s[i][j] };
                    let dn = if j > 0 { s[i][j - 1] } else { s[i][j] };
                    // low[0] = 0 makes the dn term drop at the axis cell.
                    let lap_r = low[j] * dn + cen[j] * s[i][j]
                        + if j + 1 < m_r { upp[j] * up } else { 0.0 };
                    s[i][j] + half * (lap_r - v_at[j] * s[i][j])
                })
                .collect();
            let off = -half * ang[j];
            let dia = vec![1.0 + 2.0 * half * ang[j]; m_t];
            cyclic_solve(off, &dia, &mut rhs);
            rhs
        })
        .collect();

    let mut next = vec![0.0; m_t * m_r];
    for i in 0..m_t {
        for j in 0..m_r {
            next[i * m_r + j] = columns[j][i];
        }
    }
    next
}
