//! Tridiagonal linear solves (Thomas algorithm).
//!
//! The implicit radial steps of the evolution engine produce strictly
//! diagonally dominant tridiagonal systems; the Thomas algorithm solves them
//! in O(n) without pivoting. Breakdown (a vanishing pivot) is reported rather
//! than papered over, since upstream that signals a malformed time step.

/// Solve a tridiagonal system in place.
///
/// `sub[i]` multiplies x[i−1] in row i (sub[0] is ignored), `dia[i]` is the
/// main diagonal, `sup[i]` multiplies x[i+1] (sup[n−1] is ignored), and `rhs`
/// holds the right-hand side. On success `rhs` is overwritten with the
/// solution; `dia` is consumed by the forward elimination.
///
/// Returns `Err` with the failing row index when a pivot underflows.
pub fn thomas_solve(
    sub: &[f64],
    dia: &mut [f64],
    sup: &[f64],
    rhs: &mut [f64],
) -> Result<(), usize> {
    let n = dia.len();
    assert_eq!(sub.len(), n);
    assert_eq!(sup.len(), n);
    assert_eq!(rhs.len(), n);
    if n == 0 {
        return Ok(());
    }
    // Forward elimination.
    for i in 1..n {
        let pivot = dia[i - 1];
        if pivot.abs() < f64::MIN_POSITIVE * 4.0 || !pivot.is_finite() {
            return Err(i - 1);
        }
        let w = sub[i] / pivot;
        dia[i] -= w * sup[i - 1];
        rhs[i] -= w * rhs[i - 1];
    }
    // Back substitution.
    let last = dia[n - 1];
    if last.abs() < f64::MIN_POSITIVE * 4.0 || !last.is_finite() {
        return Err(n - 1);
    }
    rhs[n - 1] /= last;
    for i in (0..n - 1).rev() {
        rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / dia[i];
    }
    Ok(())
}
