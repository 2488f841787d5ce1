//! Small dense-matrix helpers shared across modules.

use nalgebra::{DMatrix, DVector};

/// `diag(d) * m`
pub(crate) fn scale_rows(d: &DVector<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert_eq!(d.len(), m.nrows());
    let mut out = m.clone();
    for (i, mut row) in out.row_iter_mut().enumerate() {
        row *= d[i];
    }
    out
}

/// `m * diag(d)`
pub(crate) fn scale_cols(m: &DMatrix<f64>, d: &DVector<f64>) -> DMatrix<f64> {
    debug_assert_eq!(d.len(), m.ncols());
    let mut out = m.clone();
    for (j, mut col) in out.column_iter_mut().enumerate() {
        col *= d[j];
    }
    out
}

/// `diag(l) * m * diag(r)`
pub(crate) fn scale_both(l: &DVector<f64>, m: &DMatrix<f64>, r: &DVector<f64>) -> DMatrix<f64> {
    let mut out = m.clone();
    for j in 0..out.ncols() {
        for i in 0..out.nrows() {
            out[(i, j)] *= l[i] * r[j];
        }
    }
    out
}

pub(crate) fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Symmetric up to `rel` times the largest entry.
pub(crate) fn is_symmetric(m: &DMatrix<f64>, rel: f64) -> bool {
    if !m.is_square() {
        return false;
    }
    let scale = max_abs(m);
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            if (m[(i, j)] - m[(j, i)]).abs() > rel * scale {
                return false;
            }
        }
    }
    true
}

/// Returns `Some(diagonal)` when every off-diagonal entry is exactly zero.
pub(crate) fn diagonal_of(m: &DMatrix<f64>) -> Option<DVector<f64>> {
    if !m.is_square() {
        return None;
    }
    let n = m.nrows();
    for j in 0..n {
        for i in 0..n {
            if i != j && m[(i, j)] != 0.0 {
                return None;
            }
        }
    }
    Some(m.diagonal())
}

/// Weighted squared norm `x^T diag(g) x`.
pub(crate) fn weighted_dot(x: &DVector<f64>, g: &DVector<f64>, y: &DVector<f64>) -> f64 {
    x.iter().zip(g.iter()).zip(y.iter()).map(|((a, w), b)| a * w * b).sum()
}
