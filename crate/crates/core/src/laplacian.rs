//! Up, down and Hodge Laplacians, Betti numbers and the Hodge decomposition.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::complex::{Basis, BasisTag, ChainVec, OpMatrix, Side, WeightedComplex};
use crate::dense::{scale_cols, scale_rows};
use crate::error::{Error, Result};
use crate::spectral::{self, PseudoinverseConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianOp {
    Up,
    Down,
    Hodge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct LaplacianKind {
    pub op: LaplacianOp,
    pub side: Side,
    pub basis: Basis,
}

impl LaplacianKind {
    pub fn new(op: LaplacianOp, side: Side, basis: Basis) -> Self {
        LaplacianKind { op, side, basis }
    }
}

/// `B_{p+1} W_{p+1} B_{p+1}^T`, zero at the top dimension.
fn up_core(k: &WeightedComplex, p: usize) -> DMatrix<f64> {
    let b = k.incidence(p + 1);
    scale_cols(&b, &k.weight_vec(p + 1, 1.0)) * b.transpose()
}

/// `B_p^T W_{p-1}^{-1} B_p`.
fn down_core(k: &WeightedComplex, p: usize) -> DMatrix<f64> {
    let b = k.incidence(p);
    b.transpose() * scale_rows(&k.weight_vec(p - 1, -1.0), &b)
}

fn up(k: &WeightedComplex, p: usize, side: Side, basis: Basis) -> DMatrix<f64> {
    match (basis, side) {
        (Basis::Standard, Side::Cochain) => scale_rows(&k.weight_vec(p, -1.0), &up_core(k, p)),
        (Basis::Standard, Side::Chain) => scale_cols(&up_core(k, p), &k.weight_vec(p, -1.0)),
        (Basis::Orthonormal, _) => {
            let b = crate::dense::scale_both(
                &k.weight_vec(p, -0.5),
                &k.incidence(p + 1),
                &k.weight_vec(p + 1, 0.5),
            );
            &b * b.transpose()
        }
    }
}

fn down(k: &WeightedComplex, p: usize, side: Side, basis: Basis) -> DMatrix<f64> {
    match (basis, side) {
        (Basis::Standard, Side::Cochain) => scale_cols(&down_core(k, p), &k.weight_vec(p, 1.0)),
        (Basis::Standard, Side::Chain) => scale_rows(&k.weight_vec(p, 1.0), &down_core(k, p)),
        (Basis::Orthonormal, _) => {
            let b = crate::dense::scale_both(
                &k.weight_vec(p - 1, -0.5),
                &k.incidence(p),
                &k.weight_vec(p, 0.5),
            );
            b.transpose() * &b
        }
    }
}

/// Matrix of a Laplacian on `C_p` or `C^p`. The up Laplacian at the top
/// dimension is the zero matrix; the down Laplacian needs `p >= 1`.
pub fn laplacian(k: &WeightedComplex, p: usize, kind: LaplacianKind) -> Result<OpMatrix> {
    k.check_dim(p, 0, k.dim())?;
    let entries = match kind.op {
        LaplacianOp::Up => up(k, p, kind.side, kind.basis),
        LaplacianOp::Down => {
            k.check_dim(p, 1, k.dim())?;
            down(k, p, kind.side, kind.basis)
        }
        LaplacianOp::Hodge => {
            let u = up(k, p, kind.side, kind.basis);
            if p == 0 {
                u
            } else {
                u + down(k, p, kind.side, kind.basis)
            }
        }
    };
    let tag = BasisTag::new(p, kind.side, kind.basis);
    Ok(OpMatrix::new(tag, tag, entries))
}

/// Dimension of the kernel of the Hodge Laplacian on `C^p`.
pub fn betti(k: &WeightedComplex, p: usize, cfg: &PseudoinverseConfig) -> Result<usize> {
    let l = laplacian(
        k,
        p,
        LaplacianKind::new(LaplacianOp::Hodge, Side::Cochain, Basis::Orthonormal),
    )?;
    spectral::nullity(&l.entries, cfg)
}

pub fn betti_numbers(k: &WeightedComplex, cfg: &PseudoinverseConfig) -> Result<Vec<usize>> {
    (0..=k.dim()).map(|p| betti(k, p, cfg)).collect()
}

/// Components of a cochain in `im delta_p^* (+) ker L_p (+) im delta_{p-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeParts {
    pub im_delta_star: ChainVec,
    pub harmonic: ChainVec,
    pub im_delta: ChainVec,
}

/// Splits a cochain by orthogonal projection (for the cochain inner product)
/// onto the three Hodge summands. Results are in the basis of `f`.
pub fn hodge_decompose(
    k: &WeightedComplex,
    f: &ChainVec,
    cfg: &PseudoinverseConfig,
) -> Result<HodgeParts> {
    k.check_vec(f)?;
    if f.basis.side() != Side::Cochain {
        return Err(Error::SideMismatch {
            from: f.basis.to_string(),
            to: f.basis.with_side(Side::Cochain).to_string(),
        });
    }
    let p = f.dim();
    let basis = f.basis.basis();
    let g = |q: usize| k.gram_diag(BasisTag::new(q, Side::Cochain, basis));
    let n = k.n(p);

    let im_delta = if p >= 1 {
        let d = k.coboundary_matrix(p - 1, basis)?.entries;
        spectral::range_projector(&d, &g(p - 1), &g(p), cfg)? * &f.coeffs
    } else {
        DVector::zeros(n)
    };
    let im_delta_star = if p < k.dim() {
        let ds = k.adjoint_coboundary_matrix(p, basis)?.entries;
        spectral::range_projector(&ds, &g(p + 1), &g(p), cfg)? * &f.coeffs
    } else {
        DVector::zeros(n)
    };
    let l = laplacian(k, p, LaplacianKind::new(LaplacianOp::Hodge, Side::Cochain, basis))?;
    let gp = g(p);
    let range = spectral::range_projector(&l.entries, &gp, &gp, cfg)?;
    let harmonic = &f.coeffs - range * &f.coeffs;

    Ok(HodgeParts {
        im_delta_star: ChainVec::new(f.basis, im_delta_star),
        harmonic: ChainVec::new(f.basis, harmonic),
        im_delta: ChainVec::new(f.basis, im_delta),
    })
}
