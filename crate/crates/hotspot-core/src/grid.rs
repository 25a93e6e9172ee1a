//! Radial grids: node grids for profile tabulation and cell grids for the
//! finite-volume evolution.
//!
//! Profile grids resolve the origin singularity with a geometric section
//! (fixed points per decade from r₀ = 10⁻⁶ up to 1) and switch to uniform
//! spacing beyond 1, where the ODE solutions are power-law smooth. Evolution
//! grids are cell-centered — no node sits at r = 0, so the degenerate weight
//! ν(r) = r^{N−1}U² never has to be divided by at the axis.

/// Node grid for harmonic-profile tabulation: geometric on [r₀, 1], uniform
/// with spacing `h_uniform` beyond.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialGrid {
    /// Strictly increasing radii.
    pub r: Vec<f64>,
    /// Number of nodes in the geometric section (including the junction node
    /// at r = 1, which is the section's last point).
    pub n_geom: usize,
    /// Points per decade in the geometric section.
    pub points_per_decade: usize,
    /// Spacing of the uniform section.
    pub h_uniform: f64,
}

impl RadialGrid {
    /// Default profile grid: r₀ = 1e-6, 128 points per decade up to 1, then
    /// uniform spacing 0.05 up to at least `r_max`.
    pub fn profile_default(r_max: f64) -> Self {
        Self::build(1e-6, 128, 0.05, r_max)
    }

    /// General constructor. `r0` must be a negative power of ten times 1
    /// (e.g. 1e-6) so the geometric section lands exactly on r = 1.
    pub fn build(r0: f64, points_per_decade: usize, h_uniform: f64, r_max: f64) -> Self {
        assert!(r0 > 0.0 && r0 < 1.0);
        assert!(r_max > 1.0, "grid must extend beyond the junction at r = 1");
        assert!(points_per_decade >= 8);
        assert!(h_uniform > 0.0);
        let decades = -r0.log10();
        assert!(
            (decades - decades.round()).abs() < 1e-9,
            "r0 must be a power of ten"
        );
        let decades = decades.round() as usize;
        let n_geom_steps = decades * points_per_decade;
        let mut r = Vec::with_capacity(n_geom_steps + 1);
        for j in 0..=n_geom_steps {
            // r0 · 10^{j/ppd}; force the junction node to exactly 1.
            if j == n_geom_steps {
                r.push(1.0);
            } else {
                r.push(r0 * 10f64.powf(j as f64 / points_per_decade as f64));
            }
        }
        let n_geom = r.len();
        let n_uni = ((r_max - 1.0) / h_uniform).ceil() as usize;
        for m in 1..=n_uni {
            r.push(1.0 + m as f64 * h_uniform);
        }
        Self {
            r,
            n_geom,
            points_per_decade,
            h_uniform,
        }
    }

    /// Largest radius in the grid.
    pub fn r_max(&self) -> f64 {
        *self.r.last().unwrap()
    }

    /// Smallest radius in the grid.
    pub fn r_min(&self) -> f64 {
        self.r[0]
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.r.len()
    }

    /// True when the grid has no nodes (never, for constructed grids).
    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Cell-centered grid for the finite-volume evolution on [0, r_dom]: a fine
/// zone covering [0, 1] with spacing h_f and a coarse zone with spacing
/// ≈ 10·h_f beyond, chosen so the requested total cell count is exact.
#[derive(Debug, Clone, PartialEq)]
pub struct CellGrid {
    /// Cell centers, strictly increasing, length = `cells`.
    pub centers: Vec<f64>,
    /// Cell edges, length = `cells` + 1; edges[0] = 0, edges[last] = r_dom.
    pub edges: Vec<f64>,
    /// Number of fine cells (covering [0, 1]).
    pub n_fine: usize,
    /// Fine spacing.
    pub h_fine: f64,
    /// Coarse spacing.
    pub h_coarse: f64,
}

impl CellGrid {
    /// Build the two-zone grid. `r_dom` must exceed 1 (the evolution domain
    /// is always ≥ 20) and `cells` must leave at least one cell per zone.
    pub fn two_zone(r_dom: f64, cells: usize) -> Self {
        assert!(r_dom > 2.0, "evolution domain must extend beyond r = 2");
        assert!(cells >= 16, "need at least 16 cells");
        // Fine zone [0,1] at spacing h, coarse zone [1, r_dom] at 10h:
        // n_f = 1/h, n_c = (r_dom − 1)/(10h), n_f + n_c = cells.
        let n_fine = ((cells as f64) / (1.0 + (r_dom - 1.0) / 10.0))
            .round()
            .max(1.0) as usize;
        let n_fine = n_fine.min(cells - 1);
        let n_coarse = cells - n_fine;
        let h_fine = 1.0 / n_fine as f64;
        let h_coarse = (r_dom - 1.0) / n_coarse as f64;
        let mut edges = Vec::with_capacity(cells + 1);
        for j in 0..=n_fine {
            edges.push(j as f64 * h_fine);
        }
        for m in 1..=n_coarse {
            edges.push(1.0 + m as f64 * h_coarse);
        }
        let centers: Vec<f64> = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Self {
            centers,
            edges,
            n_fine,
            h_fine,
            h_coarse,
        }
    }

    /// Number of cells.
    pub fn len(&self) -> usize {
        self.centers.len()
    }

    /// True when the grid has no cells (never, for constructed grids).
    pub fn is_empty(&self) -> bool {
        self.centers.is_empty()
    }

    /// Outer domain radius.
    pub fn r_dom(&self) -> f64 {
        *self.edges.last().unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn profile_grid_layout() {
        let g = RadialGrid::profile_default(1e3);
        assert!((g.r[0] - 1e-6).abs() < 1e-18);
        // Junction lands exactly on 1.
        assert_eq!(g.r[g.n_geom - 1], 1.0);
        assert_eq!(g.n_geom, 6 * 128 + 1);
        assert!(g.r_max() >= 1e3);
        // Strictly increasing throughout.
        assert!(g.r.windows(2).all(|w| w[1] > w[0]));
        // Geometric ratio is uniform in the first section.
        let q0 = g.r[1] / g.r[0];
        let q1 = g.r[200] / g.r[199];
        assert!((q0 - q1).abs() < 1e-12);
        // Uniform spacing beyond 1.
        let h = g.r[g.n_geom + 5] - g.r[g.n_geom + 4];
        assert!((h - g.h_uniform).abs() < 1e-12);
    }

    #[test]
    fn cell_grid_tiles_domain() {
        let g = CellGrid::two_zone(253.0, 4096);
        assert_eq!(g.centers.len(), 4096);
        assert_eq!(g.edges.len(), 4097);
        assert_eq!(g.edges[0], 0.0);
        assert!((g.r_dom() - 253.0).abs() < 1e-9);
        // Fine zone ends exactly at 1.
        assert!((g.edges[g.n_fine] - 1.0).abs() < 1e-12);
        // Cells tile the domain: every center is inside its edge pair.
        for j in 0..g.len() {
            assert!(g.edges[j] < g.centers[j] && g.centers[j] < g.edges[j + 1]);
        }
        // Coarse/fine ratio is near 10.
        assert!((g.h_coarse / g.h_fine - 10.0).abs() < 1.0);
    }
}
