//! Effective-resistance operators and bilinear forms, graph vertex resistance,
//! and the matrix formulations of Osting et al., Kook-Lee and Black-Maxwell.

use nalgebra::{Cholesky, DMatrix, DVector};
use serde::Serialize;

use crate::complex::{Basis, BasisTag, ChainVec, OpMatrix, Side, Simplex, WeightedComplex};
use crate::dense::{scale_both, scale_cols};
use crate::error::{Error, Result};
use crate::laplacian::{laplacian, LaplacianKind, LaplacianOp};
use crate::spectral::{self, sym_eigen, PseudoinverseConfig};

/// Relative residual above which a chain is declared not to lie in a subspace.
pub const MEMBERSHIP_TOL: f64 = 1e-8;

fn check_er_dim(k: &WeightedComplex, p: usize) -> Result<()> {
    k.check_dim(p, 1, k.dim())
}

/// `T_p` in the standard chain basis: `d_p^* (L^up_{p-1})^+ d_p` with the
/// pseudoinverse taken for the chain inner product.
fn chain_operator_std(
    k: &WeightedComplex,
    p: usize,
    cfg: &PseudoinverseConfig,
) -> Result<DMatrix<f64>> {
    let b = k.boundary_matrix(p, Basis::Standard)?.entries;
    let bstar = k.adjoint_boundary_matrix(p, Basis::Standard)?.entries;
    let l = laplacian(
        k,
        p - 1,
        LaplacianKind::new(LaplacianOp::Up, Side::Chain, Basis::Standard),
    )?
    .entries;
    let g = k.weight_vec(p - 1, -1.0);
    let lp = spectral::pinv_weighted(&l, &g, &g, cfg)?;
    Ok(bstar * lp * b)
}

/// `T^p` in the standard cochain basis: `delta_{p-1} (L^{p-1}_up)^+ delta_{p-1}^*`.
fn cochain_operator_std(
    k: &WeightedComplex,
    p: usize,
    cfg: &PseudoinverseConfig,
) -> Result<DMatrix<f64>> {
    let d = k.coboundary_matrix(p - 1, Basis::Standard)?.entries;
    let dstar = k.adjoint_coboundary_matrix(p - 1, Basis::Standard)?.entries;
    let l = laplacian(
        k,
        p - 1,
        LaplacianKind::new(LaplacianOp::Up, Side::Cochain, Basis::Standard),
    )?
    .entries;
    let g = k.weight_vec(p - 1, 1.0);
    let lp = spectral::pinv_weighted(&l, &g, &g, cfg)?;
    Ok(d * lp * dstar)
}

/// Matrix of the effective-resistance operator `T_p` (chains) or `T^p`
/// (cochains) in the requested basis.
pub fn er_operator(
    k: &WeightedComplex,
    p: usize,
    side: Side,
    basis: Basis,
    cfg: &PseudoinverseConfig,
) -> Result<OpMatrix> {
    check_er_dim(k, p)?;
    let entries = match (side, basis) {
        (Side::Chain, Basis::Standard) => chain_operator_std(k, p, cfg)?,
        (Side::Chain, Basis::Orthonormal) => scale_both(
            &k.weight_vec(p, -0.5),
            &chain_operator_std(k, p, cfg)?,
            &k.weight_vec(p, 0.5),
        ),
        (Side::Cochain, Basis::Standard) => cochain_operator_std(k, p, cfg)?,
        (Side::Cochain, Basis::Orthonormal) => scale_both(
            &k.weight_vec(p, 0.5),
            &cochain_operator_std(k, p, cfg)?,
            &k.weight_vec(p, -0.5),
        ),
    };
    let tag = BasisTag::new(p, side, basis);
    Ok(OpMatrix::new(tag, tag, entries))
}

/// Matrix of the bilinear form `R_p(a, b) = <T_p a, b>` on `C_p`, as a map
/// from chains to cochains (`R_p(a, b) = a^T R b`).
///
/// Standard basis: `B^T D (D B W_p B^T D)^+ D B` with `D = W_{p-1}^{-1/2}`;
/// orthonormal basis: `W_p^{1/2} R W_p^{1/2}`.
pub fn er_bilinear_matrix(
    k: &WeightedComplex,
    p: usize,
    basis: Basis,
    cfg: &PseudoinverseConfig,
) -> Result<OpMatrix> {
    check_er_dim(k, p)?;
    let b = k.incidence(p);
    let d = k.weight_vec(p - 1, -0.5);
    let a = crate::dense::scale_rows(&d, &b);
    let a_half = scale_cols(&a, &k.weight_vec(p, 0.5));
    let inner = &a_half * a_half.transpose();
    let ip = spectral::pinv(&inner, cfg)?;
    let entries = match basis {
        Basis::Standard => a.transpose() * ip * &a,
        Basis::Orthonormal => a_half.transpose() * ip * &a_half,
    };
    Ok(OpMatrix::new(
        BasisTag::new(p, Side::Chain, basis),
        BasisTag::new(p, Side::Cochain, basis),
        entries,
    ))
}

fn require_chain(v: &ChainVec) -> Result<()> {
    if v.basis.side() != Side::Chain {
        return Err(Error::SideMismatch {
            from: v.basis.to_string(),
            to: v.basis.with_side(Side::Chain).to_string(),
        });
    }
    Ok(())
}

fn require_cochain(v: &ChainVec) -> Result<()> {
    if v.basis.side() != Side::Cochain {
        return Err(Error::SideMismatch {
            from: v.basis.to_string(),
            to: v.basis.with_side(Side::Cochain).to_string(),
        });
    }
    Ok(())
}

/// `R_p(a, b)` for two p-chains given in the same basis.
pub fn bilinear_form(
    k: &WeightedComplex,
    a: &ChainVec,
    b: &ChainVec,
    cfg: &PseudoinverseConfig,
) -> Result<f64> {
    require_chain(a)?;
    if a.basis != b.basis {
        return Err(Error::BasisMismatch {
            expected: a.basis.to_string(),
            found: b.basis.to_string(),
        });
    }
    k.check_vec(a)?;
    k.check_vec(b)?;
    let r = er_bilinear_matrix(k, a.dim(), a.basis.basis(), cfg)?;
    Ok(a.coeffs.dot(&(&r.entries * &b.coeffs)))
}

/// Effective resistance `r_a = <T_p a, a>` of a chain.
pub fn er_of_chain(k: &WeightedComplex, a: &ChainVec, cfg: &PseudoinverseConfig) -> Result<f64> {
    require_chain(a)?;
    k.check_vec(a)?;
    let t = er_operator(k, a.dim(), Side::Chain, a.basis.basis(), cfg)?;
    k.inner_product(&t.apply(a)?, a)
}

/// Effective resistance `r_f = <T^p f, f>` of a cochain, equal to that of its
/// sharp.
pub fn er_of_cochain(
    k: &WeightedComplex,
    f: &ChainVec,
    cfg: &PseudoinverseConfig,
) -> Result<f64> {
    require_cochain(f)?;
    k.check_vec(f)?;
    let t = er_operator(k, f.dim(), Side::Cochain, f.basis.basis(), cfg)?;
    k.inner_product(&t.apply(f)?, f)
}

/// `(r_s, w(s) r_s)` for a simplex of dimension at least one.
pub fn er_of_simplex(
    k: &WeightedComplex,
    s: &Simplex,
    cfg: &PseudoinverseConfig,
) -> Result<(f64, f64)> {
    let idx = k
        .index_of(s)
        .ok_or_else(|| Error::SimplexNotFound(s.to_string()))?;
    let p = s.dim();
    check_er_dim(k, p)?;
    let r = er_bilinear_matrix(k, p, Basis::Standard, cfg)?.entries[(idx, idx)];
    Ok((r, k.weights(p)[idx] * r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexER {
    pub simplex: Simplex,
    pub weight: f64,
    pub r: f64,
    pub wr: f64,
}

/// Bilinear-form matrix in the chosen basis plus the per-simplex resistances.
#[derive(Debug, Clone, PartialEq)]
pub struct ERReport {
    pub p: usize,
    pub basis: BasisTag,
    pub matrix: OpMatrix,
    pub per_simplex: Vec<SimplexER>,
}

pub fn er_report(
    k: &WeightedComplex,
    p: usize,
    basis: Basis,
    cfg: &PseudoinverseConfig,
) -> Result<ERReport> {
    let std = er_bilinear_matrix(k, p, Basis::Standard, cfg)?;
    let per_simplex = k
        .simplices(p)
        .iter()
        .zip(k.weights(p))
        .enumerate()
        .map(|(i, (s, &w))| {
            let r = std.entries[(i, i)];
            SimplexER {
                simplex: s.clone(),
                weight: w,
                r,
                wr: w * r,
            }
        })
        .collect();
    let matrix = match basis {
        Basis::Standard => std,
        Basis::Orthonormal => er_bilinear_matrix(k, p, basis, cfg)?,
    };
    Ok(ERReport {
        p,
        basis: matrix.domain,
        matrix,
        per_simplex,
    })
}

/// Least-squares preimage `x` of a standard (p-1)-chain under `B_p`, or
/// `NotABoundary` when the relative residual exceeds [`MEMBERSHIP_TOL`].
pub(crate) fn boundary_preimage(
    k: &WeightedComplex,
    p: usize,
    beta: &DVector<f64>,
    cfg: &PseudoinverseConfig,
) -> Result<DVector<f64>> {
    let b = k.incidence(p);
    let (x, residual) = spectral::lstsq(&b, beta, cfg)?;
    if residual > MEMBERSHIP_TOL {
        return Err(Error::NotABoundary { residual });
    }
    Ok(x)
}

/// `R_p(x, x')` for the (p-1)-boundaries `beta = d x`, `beta' = d x'`. The
/// result does not depend on the chosen preimages.
pub fn boundary_form(
    k: &WeightedComplex,
    beta: &ChainVec,
    beta2: &ChainVec,
    cfg: &PseudoinverseConfig,
) -> Result<f64> {
    require_chain(beta)?;
    if beta.basis != beta2.basis {
        return Err(Error::BasisMismatch {
            expected: beta.basis.to_string(),
            found: beta2.basis.to_string(),
        });
    }
    let p = beta.dim() + 1;
    check_er_dim(k, p)?;
    let b1 = k.to_standard(beta)?.coeffs;
    let b2 = k.to_standard(beta2)?.coeffs;
    let x = boundary_preimage(k, p, &b1, cfg)?;
    let y = boundary_preimage(k, p, &b2, cfg)?;
    let r = er_bilinear_matrix(k, p, Basis::Standard, cfg)?.entries;
    Ok(x.dot(&(r * y)))
}

/// Component label of every vertex in the 1-skeleton.
pub(crate) fn components(k: &WeightedComplex) -> Vec<usize> {
    let n = k.n(0);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for e in k.simplices(1) {
        let a = k.vertex_index(e.vertices()[0]).expect("faces are present");
        let b = k.vertex_index(e.vertices()[1]).expect("faces are present");
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    (0..n).map(|x| find(&mut parent, x)).collect()
}

/// Classical resistance distance `(1_u - 1_v)^T L^+ (1_u - 1_v)` on the
/// weighted 1-skeleton, with `L = B_1 W_1 B_1^T`.
pub fn vertex_er(k: &WeightedComplex, u: u64, v: u64, cfg: &PseudoinverseConfig) -> Result<f64> {
    let iu = k.vertex_index(u).ok_or(Error::VertexNotFound(u))?;
    let iv = k.vertex_index(v).ok_or(Error::VertexNotFound(v))?;
    if !k.has_unit_vertex_weights() {
        return Err(Error::NonUnitVertexWeights);
    }
    if iu == iv {
        return Ok(0.0);
    }
    let comp = components(k);
    if comp[iu] != comp[iv] {
        return Err(Error::Disconnected(u, v));
    }
    let b = k.incidence(1);
    let l = scale_cols(&b, &k.weight_vec(1, 1.0)) * b.transpose();
    let lp = spectral::pinv(&l, cfg)?;
    let mut x = DVector::zeros(k.n(0));
    x[iu] = 1.0;
    x[iv] = -1.0;
    Ok(x.dot(&(lp * &x)))
}

/// `R_p = B_p^T (B_p W_p B_p^T)^+ B_p`, ignoring the (p-1)-weights.
pub fn osting_matrix(k: &WeightedComplex, p: usize, cfg: &PseudoinverseConfig) -> Result<OpMatrix> {
    check_er_dim(k, p)?;
    let b = k.incidence(p);
    let l = scale_cols(&b, &k.weight_vec(p, 1.0)) * b.transpose();
    let lp = spectral::pinv(&l, cfg)?;
    Ok(OpMatrix::new(
        BasisTag::chain(p),
        BasisTag::cochain(p),
        b.transpose() * lp * &b,
    ))
}

/// `R'_d = B_d^T L_{d-1}^{-1} B_d` with the Hodge Laplacian
/// `L_{d-1} = B_d W_d B_d^T + B_{d-1}^T B_{d-1}` inverted directly. Only the
/// d-weights enter.
pub fn kook_lee_matrix(
    k: &WeightedComplex,
    d: usize,
    cfg: &PseudoinverseConfig,
) -> Result<OpMatrix> {
    check_er_dim(k, d)?;
    let b = k.incidence(d);
    let lower = k.incidence(d - 1);
    let l = scale_cols(&b, &k.weight_vec(d, 1.0)) * b.transpose() + lower.transpose() * &lower;
    let n = l.nrows();
    let (vals, _) = sym_eigen(&l);
    let top = vals.amax();
    let bottom = vals.min();
    if n > 0 && bottom <= cfg.rel_tol * n as f64 * top {
        return Err(Error::SingularHodgeLaplacian(d - 1));
    }
    let inv = Cholesky::new(l)
        .ok_or(Error::SingularHodgeLaplacian(d - 1))?
        .inverse();
    Ok(OpMatrix::new(
        BasisTag::chain(d),
        BasisTag::cochain(d),
        b.transpose() * inv * &b,
    ))
}

/// Resistance of a (p-1)-cycle: finite on boundaries, the distinguished
/// `NotABoundary` value otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum CycleResistance {
    Finite(f64),
    NotABoundary,
}

impl CycleResistance {
    pub fn finite(self) -> Option<f64> {
        match self {
            CycleResistance::Finite(r) => Some(r),
            CycleResistance::NotABoundary => None,
        }
    }
}

fn relative(res: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        res / scale
    } else {
        res
    }
}

/// Checks `B_q c = 0` for a standard q-chain (every 0-chain is a cycle).
pub(crate) fn check_cycle(k: &WeightedComplex, c: &DVector<f64>, q: usize) -> Result<()> {
    if q == 0 {
        return Ok(());
    }
    let b = k.incidence(q);
    let residual = relative((&b * c).norm(), c.norm());
    if residual > MEMBERSHIP_TOL {
        return Err(Error::NotACycle { residual });
    }
    Ok(())
}

/// `gamma^T (B_p W_p B_p^T)^+ gamma` for a (p-1)-cycle `gamma` in the image
/// of `B_p`.
pub fn black_maxwell_er(
    k: &WeightedComplex,
    gamma: &ChainVec,
    cfg: &PseudoinverseConfig,
) -> Result<CycleResistance> {
    require_chain(gamma)?;
    k.check_vec(gamma)?;
    let g = k.to_standard(gamma)?.coeffs;
    let q = gamma.dim();
    check_cycle(k, &g, q)?;
    let p = q + 1;
    if p > k.dim() {
        return Ok(if g.iter().all(|&x| x == 0.0) {
            CycleResistance::Finite(0.0)
        } else {
            CycleResistance::NotABoundary
        });
    }
    match boundary_preimage(k, p, &g, cfg) {
        Ok(_) => {}
        Err(Error::NotABoundary { .. }) => return Ok(CycleResistance::NotABoundary),
        Err(e) => return Err(e),
    }
    let b = k.incidence(p);
    let l = scale_cols(&b, &k.weight_vec(p, 1.0)) * b.transpose();
    let lp = spectral::pinv(&l, cfg)?;
    Ok(CycleResistance::Finite(g.dot(&(lp * &g))))
}
