//! Moore-Penrose pseudoinverses, including the representation of an operator's
//! pseudoinverse in orthogonal (weighted) bases.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::complex::OpMatrix;
use crate::dense::{diagonal_of, is_symmetric, scale_both, scale_rows};
use crate::error::{Error, Result};

/// Rank decision for pseudoinverses: singular values (or eigenvalue moduli) at
/// or below `rel_tol * max(rows, cols) * sigma_max` are treated as zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PseudoinverseConfig {
    pub rel_tol: f64,
}

impl Default for PseudoinverseConfig {
    fn default() -> Self {
        PseudoinverseConfig { rel_tol: 1e-10 }
    }
}

impl PseudoinverseConfig {
    pub fn new(rel_tol: f64) -> Self {
        assert!(rel_tol > 0.0, "rel_tol must be positive");
        PseudoinverseConfig { rel_tol }
    }

    fn cutoff(&self, rows: usize, cols: usize, largest: f64) -> f64 {
        self.rel_tol * rows.max(cols) as f64 * largest
    }
}

// Symmetric inputs must agree with their transpose to this relative level.
const SYM_REL: f64 = 1e-12;

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn symmetrized(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues (ascending) and orthonormal eigenvectors of a symmetric matrix.
/// Only the lower triangle is read.
///
/// nalgebra's dense eigen and SVD routines lose accuracy on some of the
/// rank-deficient matrices met here, so the factorizations go through faer.
pub(crate) fn sym_eigen(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    if n == 0 {
        return (DVector::zeros(0), DMatrix::zeros(0, 0));
    }
    let fm = faer::Mat::<f64>::from_fn(n, n, |i, j| m[(i, j)]);
    let eig = fm
        .self_adjoint_eigen(faer::Side::Lower)
        .expect("symmetric eigensolver did not converge");
    let s = eig.S().column_vector();
    let u = eig.U();
    (
        DVector::from_fn(n, |i, _| s[i]),
        DMatrix::from_fn(n, n, |i, j| u[(i, j)]),
    )
}

/// Singular triplets `(s, u, v)` with `M v = s u`, descending in `s`.
fn svd(m: &DMatrix<f64>) -> Vec<(f64, DVector<f64>, DVector<f64>)> {
    let (r, c) = m.shape();
    let fm = faer::Mat::<f64>::from_fn(r, c, |i, j| m[(i, j)]);
    let dec = fm.thin_svd().expect("SVD did not converge");
    let s = dec.S().column_vector();
    let (u, v) = (dec.U(), dec.V());
    (0..r.min(c))
        .map(|k| {
            (
                s[k],
                DVector::from_fn(r, |i, _| u[(i, k)]),
                DVector::from_fn(c, |i, _| v[(i, k)]),
            )
        })
        .collect()
}

/// Singular values (or |eigenvalues| for symmetric input), descending.
pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_finite(m)?;
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(Vec::new());
    }
    let mut s: Vec<f64> = if is_symmetric(m, SYM_REL) {
        sym_eigen(&symmetrized(m))
            .0
            .iter()
            .map(|x| x.abs())
            .collect()
    } else {
        svd(m).into_iter().map(|(s, _, _)| s).collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// Moore-Penrose pseudoinverse. Symmetric matrices go through the spectral
/// decomposition, everything else through the SVD.
pub fn pinv(m: &DMatrix<f64>, cfg: &PseudoinverseConfig) -> Result<DMatrix<f64>> {
    check_finite(m)?;
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return Ok(DMatrix::zeros(c, r));
    }
    if is_symmetric(m, SYM_REL) {
        let (vals, vecs) = sym_eigen(&symmetrized(m));
        let largest = vals.amax();
        let cut = cfg.cutoff(r, c, largest);
        let mut out = DMatrix::zeros(r, r);
        for (k, &lam) in vals.iter().enumerate() {
            if lam.abs() > cut && lam != 0.0 {
                let v = vecs.column(k);
                out += (v * v.transpose()) / lam;
            }
        }
        return Ok(out);
    }
    let triplets = svd(m);
    let largest = triplets.first().map_or(0.0, |t| t.0);
    let cut = cfg.cutoff(r, c, largest);
    let mut out = DMatrix::zeros(c, r);
    for (s, u, v) in &triplets {
        if *s > cut && *s != 0.0 {
            out += (v * u.transpose()) / *s;
        }
    }
    Ok(out)
}

/// Numerical rank under the pseudoinverse cutoff.
pub fn rank(m: &DMatrix<f64>, cfg: &PseudoinverseConfig) -> Result<usize> {
    let s = singular_values(m)?;
    let Some(&largest) = s.first() else {
        return Ok(0);
    };
    let cut = cfg.cutoff(m.nrows(), m.ncols(), largest);
    Ok(s.iter().filter(|&&x| x > cut && x != 0.0).count())
}

/// Dimension of the kernel, `cols - rank`.
pub fn nullity(m: &DMatrix<f64>, cfg: &PseudoinverseConfig) -> Result<usize> {
    Ok(m.ncols() - rank(m, cfg)?)
}

/// Pseudoinverse of the operator whose matrix in bases with diagonal Gram
/// matrices `g_dom`, `g_cod` is `a`, expressed in the same bases:
/// `G_dom^{-1/2} (G_cod^{1/2} A G_dom^{-1/2})^+ G_cod^{1/2}`.
pub fn pinv_weighted(
    a: &DMatrix<f64>,
    g_dom: &DVector<f64>,
    g_cod: &DVector<f64>,
    cfg: &PseudoinverseConfig,
) -> Result<DMatrix<f64>> {
    if g_dom.len() != a.ncols() || g_cod.len() != a.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "matrix is {}x{}, Grams have sizes {} (domain) and {} (codomain)",
            a.nrows(),
            a.ncols(),
            g_dom.len(),
            g_cod.len()
        )));
    }
    check_finite(a)?;
    if g_dom.iter().chain(g_cod.iter()).any(|&g| !(g > 0.0) || !g.is_finite()) {
        return Err(Error::NonDiagonalGram);
    }
    let dom_isqrt = g_dom.map(|g| 1.0 / g.sqrt());
    let cod_sqrt = g_cod.map(f64::sqrt);
    let inner = scale_both(&cod_sqrt, a, &dom_isqrt);
    let p = pinv(&inner, cfg)?;
    Ok(scale_both(&dom_isqrt, &p, &cod_sqrt))
}

/// [`pinv_weighted`] on tagged matrices. The Gram matrices must be diagonal with
/// positive entries and tagged with the domain and codomain bases of `a`.
pub fn pinv_in_bases(
    a: &OpMatrix,
    g_dom: &OpMatrix,
    g_cod: &OpMatrix,
    cfg: &PseudoinverseConfig,
) -> Result<OpMatrix> {
    for (g, tag) in [(g_dom, a.domain), (g_cod, a.codomain)] {
        if g.domain != tag || g.codomain != tag {
            return Err(Error::BasisMismatch {
                expected: tag.to_string(),
                found: g.domain.to_string(),
            });
        }
    }
    let dd = diagonal_of(&g_dom.entries).ok_or(Error::NonDiagonalGram)?;
    let dc = diagonal_of(&g_cod.entries).ok_or(Error::NonDiagonalGram)?;
    let entries = pinv_weighted(&a.entries, &dd, &dc, cfg)?;
    Ok(OpMatrix::new(a.codomain, a.domain, entries))
}

/// Projector onto the image of `a`, orthogonal for the codomain Gram `g_cod`.
pub fn range_projector(
    a: &DMatrix<f64>,
    g_dom: &DVector<f64>,
    g_cod: &DVector<f64>,
    cfg: &PseudoinverseConfig,
) -> Result<DMatrix<f64>> {
    Ok(a * pinv_weighted(a, g_dom, g_cod, cfg)?)
}

/// Orthonormal basis (as columns) of the kernel of `m`, with the kernel
/// dimension decided by [`nullity`].
pub fn null_basis(m: &DMatrix<f64>, cfg: &PseudoinverseConfig) -> Result<DMatrix<f64>> {
    let k = nullity(m, cfg)?;
    let n = m.ncols();
    if k == 0 {
        return Ok(DMatrix::zeros(n, 0));
    }
    if m.nrows() == 0 {
        return Ok(DMatrix::identity(n, n));
    }
    let (sym, by_abs) = if is_symmetric(m, SYM_REL) {
        (symmetrized(m), true)
    } else {
        (m.transpose() * m, false)
    };
    let (vals, vecs) = sym_eigen(&sym);
    let mut order: Vec<usize> = (0..n).collect();
    let key = |i: usize| {
        let l = vals[i];
        if by_abs {
            l.abs()
        } else {
            l
        }
    };
    order.sort_by(|&a, &b| key(a).total_cmp(&key(b)));
    let cols: Vec<_> = order[..k].iter().map(|&i| vecs.column(i).into_owned()).collect();
    Ok(DMatrix::from_columns(&cols))
}

/// Outcome of [`verify_moore_penrose`]. Residuals are Frobenius norms relative
/// to the norm of the matrix they are compared with (absolute when that norm
/// vanishes).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MoorePenroseReport {
    pub m_mp_m: bool,
    pub mp_m_mp: bool,
    pub m_mp_symmetric: bool,
    pub mp_m_symmetric: bool,
    pub residuals: [f64; 4],
}

impl MoorePenroseReport {
    pub fn all_pass(&self) -> bool {
        self.m_mp_m && self.mp_m_mp && self.m_mp_symmetric && self.mp_m_symmetric
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }
}

fn rel_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    let scale = b.norm();
    let d = (a - b).norm();
    if scale > 0.0 {
        d / scale
    } else {
        d
    }
}

/// Checks the four Penrose identities for a candidate `mp`. With `grams =
/// Some((g_dom, g_cod))` the two projector conditions become self-adjointness
/// for those inner products, i.e. symmetry of `G_cod M Mp` and `G_dom Mp M`.
pub fn verify_moore_penrose(
    m: &DMatrix<f64>,
    mp: &DMatrix<f64>,
    tol: f64,
    grams: Option<(&DVector<f64>, &DVector<f64>)>,
) -> Result<MoorePenroseReport> {
    if mp.nrows() != m.ncols() || mp.ncols() != m.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "candidate is {}x{}, expected {}x{}",
            mp.nrows(),
            mp.ncols(),
            m.ncols(),
            m.nrows()
        )));
    }
    if let Some((gd, gc)) = grams {
        if gd.len() != m.ncols() || gc.len() != m.nrows() {
            return Err(Error::ShapeMismatch("Gram sizes do not match matrix".into()));
        }
    }
    let m_mp = m * mp;
    let mp_m = mp * m;
    let r1 = rel_diff(&(&m_mp * m), m);
    let r2 = rel_diff(&(&mp_m * mp), mp);
    let (s1, s2) = match grams {
        Some((gd, gc)) => (scale_rows(gc, &m_mp), scale_rows(gd, &mp_m)),
        None => (m_mp, mp_m),
    };
    let r3 = rel_diff(&s1.transpose(), &s1);
    let r4 = rel_diff(&s2.transpose(), &s2);
    Ok(MoorePenroseReport {
        m_mp_m: r1 <= tol,
        mp_m_mp: r2 <= tol,
        m_mp_symmetric: r3 <= tol,
        mp_m_symmetric: r4 <= tol,
        residuals: [r1, r2, r3, r4],
    })
}

/// Least-squares solution `x = A^+ b` together with the relative residual
/// `|A x - b| / |b|` (absolute when `b = 0`).
pub(crate) fn lstsq(
    a: &DMatrix<f64>,
    b: &DVector<f64>,
    cfg: &PseudoinverseConfig,
) -> Result<(DVector<f64>, f64)> {
    let x = pinv(a, cfg)? * b;
    let res = (a * &x - b).norm();
    let scale = b.norm();
    Ok((x, if scale > 0.0 { res / scale } else { res }))
}
