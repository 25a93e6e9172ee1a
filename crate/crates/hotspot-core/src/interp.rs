//! Piecewise-cubic interpolation on strictly increasing nodes.
//!
//! Two slope policies cover every consumer in the crate:
//!
//! * [`CubicHermite::new`] takes exact derivatives (ODE solutions carry U and
//!   U′ together, so profile interpolation is genuine 4th-order Hermite);
//! * [`CubicHermite::pchip`] derives shape-preserving slopes from the values
//!   alone (Fritsch–Carlson), producing a C¹ interpolant that never
//!   overshoots — this is what makes tabulated potentials C¹ by construction.
//!
//! Evaluation outside the node range continues the boundary cubic; callers
//! that need a different extension (e.g. power-law potential tails) handle it
//! before consulting the interpolant.

/// Cubic Hermite interpolant: nodes `x`, values `y`, and nodal slopes `dy`.
#[derive(Debug, Clone, PartialEq)]
pub struct CubicHermite {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl CubicHermite {
    /// Build from explicit nodal derivatives. Panics unless `x` is strictly
    /// increasing and all three slices share a length ≥ 2.
    pub fn new(x: Vec<f64>, y: Vec<f64>, dy: Vec<f64>) -> Self {
        assert!(x.len() >= 2, "need at least two nodes");
        assert_eq!(x.len(), y.len());
        assert_eq!(x.len(), dy.len());
        assert!(
            x.windows(2).all(|w| w[1] > w[0]),
            "nodes must be strictly increasing"
        );
        Self { x, y, dy }
    }

    /// Build with finite-difference slopes (three-point, second order; the
    /// boundary slopes are one-sided second order).
    pub fn from_values(x: Vec<f64>, y: Vec<f64>) -> Self {
        let dy = fd_slopes(&x, &y);
        Self::new(x, y, dy)
    }

    /// Build with Fritsch–Carlson monotone (shape-preserving) slopes.
    pub fn pchip(x: Vec<f64>, y: Vec<f64>) -> Self {
        let dy = pchip_slopes(&x, &y);
        Self::new(x, y, dy)
    }

    /// Interpolation nodes.
    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    /// Nodal values.
    pub fn values(&self) -> &[f64] {
        &self.y
    }

    /// Index of the segment [x_i, x_{i+1}] containing (or nearest to) `xq`.
    fn segment(&self, xq: f64) -> usize {
        let n = self.x.len();
        if xq <= self.x[0] {
            return 0;
        }
        if xq >= self.x[n - 1] {
            return n - 2;
        }
        // Binary search for the rightmost node ≤ xq.
        match self.x.binary_search_by(|v| v.partial_cmp(&xq).unwrap()) {
            Ok(i) => i.min(n - 2),
            Err(i) => i - 1,
        }
    }

    /// Evaluate the interpolant at `xq`.
    pub fn eval(&self, xq: f64) -> f64 {
        let i = self.segment(xq);
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        h00 * self.y[i] + h10 * h * self.dy[i] + h01 * self.y[i + 1] + h11 * h * self.dy[i + 1]
    }

    /// Evaluate the interpolant's derivative at `xq`.
    pub fn eval_deriv(&self, xq: f64) -> f64 {
        let i = self.segment(xq);
        let h = self.x[i + 1] - self.x[i];
        let t = (xq - self.x[i]) / h;
        // d/dt of the Hermite basis, divided by h.
        let d00 = 6.0 * t * t - 6.0 * t;
        let d10 = 3.0 * t * t - 4.0 * t + 1.0;
        let d01 = -6.0 * t * t + 6.0 * t;
        let d11 = 3.0 * t * t - 2.0 * t;
        (d00 * self.y[i] + d01 * self.y[i + 1]) / h + d10 * self.dy[i] + d11 * self.dy[i + 1]
    }
}

fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// Three-point finite-difference slopes on nonuniform nodes.
fn fd_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 2);
    let h = |i: usize| x[i + 1] - x[i];
    let delta = |i: usize| (y[i + 1] - y[i]) / h(i);
    let mut dy = vec![0.0; n];
    if n == 2 {
        dy[0] = delta(0);
        dy[1] = delta(0);
        return dy;
    }
    for i in 1..n - 1 {
        let (hl, hr) = (h(i - 1), h(i));
        dy[i] = (hr * delta(i - 1) + hl * delta(i)) / (hl + hr);
    }
    dy[0] = one_sided(h(0), h(1), delta(0), delta(1));
    dy[n - 1] = one_sided(h(n - 2), h(n - 3), delta(n - 2), delta(n - 3));
    dy
}

/// Second-order one-sided slope at a boundary.
fn one_sided(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1)
}

/// Fritsch–Carlson monotone slopes: harmonic-mean weighting in monotone
/// stretches, zero at local extrema, limited one-sided values at the ends.
fn pchip_slopes(x: &[f64], y: &[f64]) -> Vec<f64> {
    let n = x.len();
    assert!(n >= 2);
    let h = |i: usize| x[i + 1] - x[i];
    let delta = |i: usize| (y[i + 1] - y[i]) / h(i);
    let mut dy = vec![0.0; n];
    if n == 2 {
        dy[0] = delta(0);
        dy[1] = delta(0);
        return dy;
    }
    for i in 1..n - 1 {
        let (d0, d1) = (delta(i - 1), delta(i));
        if d0 * d1 <= 0.0 {
            dy[i] = 0.0;
        } else {
            let (hl, hr) = (h(i - 1), h(i));
            let w1 = 2.0 * hr + hl;
            let w2 = hr + 2.0 * hl;
            dy[i] = (w1 + w2) / (w1 / d0 + w2 / d1);
        }
    }
    dy[0] = pchip_end(h(0), h(1), delta(0), delta(1));
    dy[n - 1] = pchip_end(h(n - 2), h(n - 3), delta(n - 2), delta(n - 3));
    dy
}

/// Boundary slope with the standard monotonicity limiter.
fn pchip_end(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let mut d = one_sided(h0, h1, d0, d1);
    if d * d0 <= 0.0 {
        d = 0.0;
    } else if d0 * d1 <= 0.0 && d.abs() > 3.0 * d0.abs() {
        d = 3.0 * d0;
    }
    d
}
