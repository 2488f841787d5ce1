//! Kirchhoff/Ohm circuit systems on chains and the Kook-Lee current-generator
//! construction.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::complex::{Basis, BasisTag, ChainVec, Side, Simplex, WeightedComplex};
use crate::dense::{scale_both, scale_cols, scale_rows};
use crate::error::{Error, Result};
use crate::resistance::MEMBERSHIP_TOL;
use crate::spectral::{self, PseudoinverseConfig};

/// A boundary current `beta` in `C_{p-1}` driving a p-dimensional circuit.
#[derive(Debug, Clone)]
pub struct CircuitProblem<'a> {
    pub complex: &'a WeightedComplex,
    pub p: usize,
    pub beta: ChainVec,
}

impl<'a> CircuitProblem<'a> {
    pub fn new(complex: &'a WeightedComplex, p: usize, beta: ChainVec) -> Self {
        CircuitProblem { complex, p, beta }
    }

    /// Current `+1` entering at `u` and leaving at `v` on a graph.
    pub fn terminals(complex: &'a WeightedComplex, u: u64, v: u64) -> Result<Self> {
        let iu = complex.vertex_index(u).ok_or(Error::VertexNotFound(u))?;
        let iv = complex.vertex_index(v).ok_or(Error::VertexNotFound(v))?;
        let mut beta = ChainVec::zeros(BasisTag::chain(0), complex.n(0));
        beta.coeffs[iu] += 1.0;
        beta.coeffs[iv] -= 1.0;
        Ok(Self::new(complex, 1, beta))
    }
}

/// Norms of the three law defects.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LawResiduals {
    /// `|d alpha - beta|` in `C_{p-1}`
    pub kcl: f64,
    /// `|delta phi - f|` in `C^p`
    pub kvl: f64,
    /// `|flat alpha - f|` in `C^p`
    pub ohm: f64,
}

impl LawResiduals {
    pub fn max(&self) -> f64 {
        self.kcl.max(self.kvl).max(self.ohm)
    }
}

/// Current `alpha`, voltage `f` and potential `phi`, all in standard bases.
#[derive(Debug, Clone, PartialEq)]
pub struct CircuitSolution {
    pub alpha: ChainVec,
    pub f: ChainVec,
    pub phi: ChainVec,
    pub residuals: LawResiduals,
}

struct Assembled {
    b: DMatrix<f64>,
    lap: DMatrix<f64>,
    flat_beta: DVector<f64>,
    beta: DVector<f64>,
}

fn assemble(prob: &CircuitProblem) -> Result<Assembled> {
    let k = prob.complex;
    let p = prob.p;
    k.check_dim(p, 1, k.dim() + 1)?;
    if prob.beta.basis.side() != Side::Chain || prob.beta.dim() != p - 1 {
        return Err(Error::BasisMismatch {
            expected: BasisTag::chain(p - 1).to_string(),
            found: prob.beta.basis.to_string(),
        });
    }
    let beta = k.to_standard(&prob.beta)?.coeffs;
    let b = k.incidence(p);
    // L^{p-1}_up = W_{p-1}^{-1} B_p W_p B_p^T on standard cochains
    let lap = scale_rows(
        &k.weight_vec(p - 1, -1.0),
        &(scale_cols(&b, &k.weight_vec(p, 1.0)) * b.transpose()),
    );
    let flat_beta = beta.component_mul(&k.weight_vec(p - 1, -1.0));
    Ok(Assembled {
        b,
        lap,
        flat_beta,
        beta,
    })
}

fn gram_norm(v: &DVector<f64>, g: &DVector<f64>) -> f64 {
    crate::dense::weighted_dot(v, g, v).max(0.0).sqrt()
}

/// Minimal-norm potential and the relative defect of `flat beta` from the
/// image of the up Laplacian.
fn potential(
    k: &WeightedComplex,
    p: usize,
    a: &Assembled,
    cfg: &PseudoinverseConfig,
) -> Result<(DVector<f64>, f64)> {
    let g = k.weight_vec(p - 1, 1.0);
    let lp = spectral::pinv_weighted(&a.lap, &g, &g, cfg)?;
    let phi = lp * &a.flat_beta;
    let defect = gram_norm(&(&a.flat_beta - &a.lap * &phi), &g);
    let scale = gram_norm(&a.flat_beta, &g);
    let residual = if scale > 0.0 { defect / scale } else { defect };
    Ok((phi, residual))
}

/// Whether `flat beta` lies in the image of the up Laplacian, i.e. whether
/// `beta` is a valid boundary current. Invalid input counts as infeasible.
pub fn check_feasible(prob: &CircuitProblem, cfg: &PseudoinverseConfig) -> bool {
    let Ok(a) = assemble(prob) else {
        return false;
    };
    matches!(potential(prob.complex, prob.p, &a, cfg), Ok((_, r)) if r <= MEMBERSHIP_TOL)
}

/// Solves `d alpha = beta`, `delta phi = f`, `flat alpha = f` with the
/// minimal-norm potential `phi = (L^{p-1}_up)^+ flat beta`.
pub fn solve_circuit(prob: &CircuitProblem, cfg: &PseudoinverseConfig) -> Result<CircuitSolution> {
    let k = prob.complex;
    let p = prob.p;
    let a = assemble(prob)?;
    let (phi, residual) = potential(k, p, &a, cfg)?;
    if residual > MEMBERSHIP_TOL {
        return Err(Error::InfeasibleBoundaryCurrent { residual });
    }
    let f = a.b.transpose() * &phi;
    let alpha = f.component_mul(&k.weight_vec(p, 1.0));
    let residuals = LawResiduals {
        kcl: gram_norm(&(&a.b * &alpha - &a.beta), &k.weight_vec(p - 1, -1.0)),
        kvl: 0.0,
        ohm: gram_norm(
            &(alpha.component_mul(&k.weight_vec(p, -1.0)) - &f),
            &k.weight_vec(p, 1.0),
        ),
    };
    Ok(CircuitSolution {
        alpha: ChainVec::new(BasisTag::chain(p), alpha),
        f: ChainVec::new(BasisTag::cochain(p), f),
        phi: ChainVec::new(BasisTag::cochain(p - 1), phi),
        residuals,
    })
}

/// Result of [`verify_laws`]. Without a declared boundary current, KCL is
/// reported as the boundary `d alpha` itself and `kcl` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct LawReport {
    pub boundary: ChainVec,
    pub residuals: LawResiduals,
}

fn expect(v: &ChainVec, tag: BasisTag) -> Result<()> {
    if v.basis.dim != tag.dim || v.basis.side() != tag.side() {
        return Err(Error::BasisMismatch {
            expected: tag.to_string(),
            found: v.basis.to_string(),
        });
    }
    Ok(())
}

/// Evaluates the circuit laws for a candidate triple.
pub fn verify_laws(
    k: &WeightedComplex,
    p: usize,
    alpha: &ChainVec,
    f: &ChainVec,
    phi: &ChainVec,
    beta: Option<&ChainVec>,
) -> Result<LawReport> {
    k.check_dim(p, 1, k.dim() + 1)?;
    expect(alpha, BasisTag::chain(p))?;
    expect(f, BasisTag::cochain(p))?;
    expect(phi, BasisTag::cochain(p - 1))?;
    let a = k.to_standard(alpha)?.coeffs;
    let f = k.to_standard(f)?.coeffs;
    let phi = k.to_standard(phi)?.coeffs;
    let b = k.incidence(p);
    let boundary = &b * &a;
    let kcl = match beta {
        Some(beta) => {
            expect(beta, BasisTag::chain(p - 1))?;
            let beta = k.to_standard(beta)?.coeffs;
            gram_norm(&(&boundary - beta), &k.weight_vec(p - 1, -1.0))
        }
        None => 0.0,
    };
    let gp = k.weight_vec(p, 1.0);
    let kvl = gram_norm(&(b.transpose() * &phi - &f), &gp);
    let ohm = gram_norm(&(a.component_mul(&k.weight_vec(p, -1.0)) - &f), &gp);
    Ok(LawReport {
        boundary: ChainVec::new(BasisTag::chain(p - 1), boundary),
        residuals: LawResiduals { kcl, kvl, ohm },
    })
}

/// Least-squares potential for a p-cochain: the minimal-norm `phi` minimising
/// `|delta_{p-1} phi - f|` for the cochain inner products.
pub fn potential_for(
    k: &WeightedComplex,
    p: usize,
    f: &ChainVec,
    cfg: &PseudoinverseConfig,
) -> Result<ChainVec> {
    k.check_dim(p, 1, k.dim())?;
    expect(f, BasisTag::cochain(p))?;
    let f = k.to_standard(f)?.coeffs;
    let d = k.coboundary_matrix(p - 1, Basis::Standard)?.entries;
    let dp = spectral::pinv_weighted(&d, &k.weight_vec(p - 1, 1.0), &k.weight_vec(p, 1.0), cfg)?;
    Ok(ChainVec::new(BasisTag::cochain(p - 1), dp * f))
}

/// An extra d-simplex `sigma` attached to a complex `X` whose boundary is the
/// boundary of `-c` for a d-chain `c` of `X`, carrying current `i_sigma`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorAttachment {
    pub sigma: Simplex,
    pub c: ChainVec,
    pub i_sigma: f64,
}

/// `d sigma` as a standard chain of `x`; every face must be present.
fn sigma_boundary(x: &WeightedComplex, sigma: &Simplex) -> Result<DVector<f64>> {
    let d = sigma.dim();
    let mut s = DVector::zeros(x.n(d - 1));
    for (sign, face) in sigma.faces() {
        let i = x
            .index_of(&face)
            .ok_or_else(|| Error::NotAGenerator(format!("face {face} of {sigma} is not in the complex")))?;
        s[i] += sign;
    }
    Ok(s)
}

impl GeneratorAttachment {
    pub fn new(sigma: Vec<u64>, c: ChainVec, i_sigma: f64) -> Result<Self> {
        let sigma = Simplex::new(sigma)?;
        if i_sigma == 0.0 || !i_sigma.is_finite() {
            return Err(Error::NotAGenerator(format!("invalid current {i_sigma}")));
        }
        if sigma.dim() == 0 {
            return Err(Error::NotAGenerator("generator must have dimension at least 1".into()));
        }
        Ok(GeneratorAttachment { sigma, c, i_sigma })
    }

    /// Finds the witness `c` with `d c = -d sigma` by least squares.
    pub fn find(
        x: &WeightedComplex,
        sigma: Vec<u64>,
        i_sigma: f64,
        cfg: &PseudoinverseConfig,
    ) -> Result<Self> {
        let sigma = Simplex::new(sigma)?;
        let d = sigma.dim();
        if d == 0 || d > x.dim() {
            return Err(Error::DimOutOfRange { p: d, min: 1, max: x.dim() });
        }
        let s = sigma_boundary(x, &sigma)?;
        let (c, residual) = spectral::lstsq(&x.incidence(d), &(-&s), cfg)?;
        if residual > MEMBERSHIP_TOL {
            return Err(Error::NotAGenerator(format!(
                "boundary of {sigma} is not a boundary in the complex (relative residual {residual:.3e})"
            )));
        }
        Self::new(sigma.vertices().to_vec(), ChainVec::new(BasisTag::chain(d), c), i_sigma)
    }
}

/// Output of the Kook-Lee construction. Vectors live on `C_d(X) (+) R sigma`
/// in standard coordinates, with the generator as the last entry.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KookLeeResult {
    pub current: Vec<f64>,
    pub voltage: Vec<f64>,
    pub v_sigma: f64,
    pub r_prime: f64,
}

impl KookLeeResult {
    /// The current restricted to the simplices of `X`.
    pub fn current_on_x(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.current[..self.current.len() - 1])
    }

    pub fn voltage_on_x(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.voltage[..self.voltage.len() - 1])
    }
}

/// Resistance `r' = -v_sigma / i_sigma` of a current generator.
///
/// The extended complex is kept as matrices in orthonormal coordinates: its
/// d-boundary is `W_{d-1}^{-1/2} [B_d W_d^{1/2} | d sigma]` (unit weight on the
/// generator) and its (d+1)-boundary is an orthonormal basis of `ker d_d^X`
/// padded with a zero generator row. The current spans the kernel of the
/// d-th Hodge Laplacian of that complex.
pub fn kook_lee_resistance(
    x: &WeightedComplex,
    gen: &GeneratorAttachment,
    cfg: &PseudoinverseConfig,
) -> Result<KookLeeResult> {
    let d = gen.sigma.dim();
    x.check_dim(d, 1, x.dim())?;
    let n = x.n(d);
    if gen.c.basis.side() != Side::Chain || gen.c.dim() != d {
        return Err(Error::BasisMismatch {
            expected: BasisTag::chain(d).to_string(),
            found: gen.c.basis.to_string(),
        });
    }
    x.check_vec(&gen.c)?;
    if gen.i_sigma == 0.0 || !gen.i_sigma.is_finite() {
        return Err(Error::NotAGenerator(format!("invalid current {}", gen.i_sigma)));
    }
    let s = sigma_boundary(x, &gen.sigma)?;
    let c = x.to_standard(&gen.c)?.coeffs;
    let b = x.incidence(d);
    let defect = (&s + &b * &c).norm() / s.norm();
    if defect > MEMBERSHIP_TOL {
        return Err(Error::NotAGenerator(format!(
            "boundary of {} differs from the boundary of -c (relative residual {defect:.3e})",
            gen.sigma
        )));
    }

    let lo = x.weight_vec(d - 1, -0.5);
    let hi = x.weight_vec(d, 0.5);
    let bx = scale_both(&lo, &b, &hi);
    let mut bz = DMatrix::zeros(bx.nrows(), n + 1);
    bz.view_mut((0, 0), (bx.nrows(), n)).copy_from(&bx);
    bz.set_column(n, &s.component_mul(&lo));

    let null = spectral::null_basis(&bx, cfg)?;
    let mut up = DMatrix::zeros(n + 1, null.ncols());
    up.view_mut((0, 0), (n, null.ncols())).copy_from(&null);
    let lz = bz.transpose() * &bz + &up * up.transpose();

    let kernel = spectral::null_basis(&lz, cfg)?;
    if kernel.ncols() != 1 {
        return Err(Error::DegenerateKernel(kernel.ncols()));
    }
    let mut v = kernel.column(0).into_owned();
    for i in 0..n {
        v[i] *= hi[i];
    }
    let scale = gen.i_sigma / v[n];
    let current = v * scale;

    let ix = current.rows(0, n).into_owned();
    let voltage_x = ix.component_mul(&x.weight_vec(d, -1.0));
    let energy = ix.dot(&voltage_x);
    let v_sigma = -energy / gen.i_sigma;
    let r_prime = -v_sigma / gen.i_sigma;

    let mut voltage: Vec<f64> = voltage_x.iter().copied().collect();
    voltage.push(v_sigma);
    Ok(KookLeeResult {
        current: current.iter().copied().collect(),
        voltage,
        v_sigma,
        r_prime,
    })
}
