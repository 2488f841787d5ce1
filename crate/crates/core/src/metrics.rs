//! Resistance (pseudo)metrics on chains and cycles, and Foster's theorem.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::complex::{Basis, ChainVec, Side, WeightedComplex};
use crate::error::{Error, Result};
use crate::resistance::{self, boundary_preimage, check_cycle, er_operator};
use crate::spectral::{self, PseudoinverseConfig};

fn same_chain_basis(a: &ChainVec, b: &ChainVec) -> Result<()> {
    if a.basis != b.basis || a.basis.side() != Side::Chain {
        return Err(Error::BasisMismatch {
            expected: a.basis.with_side(Side::Chain).to_string(),
            found: b.basis.to_string(),
        });
    }
    Ok(())
}

/// `|T v|` in the chain norm for a standard-basis chain `v`.
fn t_norm(k: &WeightedComplex, t: &DMatrix<f64>, p: usize, v: &DVector<f64>) -> f64 {
    let tv = t * v;
    crate::dense::weighted_dot(&tv, &k.weight_vec(p, -1.0), &tv)
        .max(0.0)
        .sqrt()
}

/// `d_p(a, b) = |T_p (a - b)|`.
pub fn chain_pseudometric(
    k: &WeightedComplex,
    a: &ChainVec,
    b: &ChainVec,
    cfg: &PseudoinverseConfig,
) -> Result<f64> {
    same_chain_basis(a, b)?;
    k.check_vec(a)?;
    k.check_vec(b)?;
    let diff = k.to_standard(&a.checked_sub(b)?)?;
    let p = diff.dim();
    let t = er_operator(k, p, Side::Chain, Basis::Standard, cfg)?.entries;
    Ok(t_norm(k, &t, p, &diff.coeffs))
}

fn cycle_distance(
    k: &WeightedComplex,
    t_next: Option<&DMatrix<f64>>,
    p: usize,
    diff: &DVector<f64>,
    cfg: &PseudoinverseConfig,
) -> Result<f64> {
    if diff.iter().all(|&x| x == 0.0) {
        return Ok(0.0);
    }
    let Some(t) = t_next else {
        return Err(Error::NotABoundary { residual: 1.0 });
    };
    let x = boundary_preimage(k, p + 1, diff, cfg)?;
    Ok(t_norm(k, t, p + 1, &x))
}

fn next_operator(
    k: &WeightedComplex,
    p: usize,
    cfg: &PseudoinverseConfig,
) -> Result<Option<DMatrix<f64>>> {
    if p + 1 > k.dim() {
        return Ok(None);
    }
    Ok(Some(er_operator(k, p + 1, Side::Chain, Basis::Standard, cfg)?.entries))
}

/// `d~_p(c, c') = |T_{p+1} x|` for any `x` with `d x = c - c'`.
pub fn cycle_metric(
    k: &WeightedComplex,
    c: &ChainVec,
    c2: &ChainVec,
    cfg: &PseudoinverseConfig,
) -> Result<f64> {
    same_chain_basis(c, c2)?;
    k.check_vec(c)?;
    k.check_vec(c2)?;
    let p = c.dim();
    let a = k.to_standard(c)?.coeffs;
    let b = k.to_standard(c2)?.coeffs;
    check_cycle(k, &a, p)?;
    check_cycle(k, &b, p)?;
    let t = next_operator(k, p, cfg)?;
    cycle_distance(k, t.as_ref(), p, &(a - b), cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FosterReport {
    pub p: usize,
    pub lhs_sum: f64,
    pub trace_t: f64,
    pub rank_b_transpose: usize,
    pub rhs: usize,
    pub pass: bool,
}

/// Compares `sum w(s) r_s` and `tr T_p` with `n_{p-1} - null(B_p^T)`.
pub fn foster_check(
    k: &WeightedComplex,
    p: usize,
    tol: f64,
    cfg: &PseudoinverseConfig,
) -> Result<FosterReport> {
    let report = resistance::er_report(k, p, Basis::Standard, cfg)?;
    let lhs_sum: f64 = report.per_simplex.iter().map(|s| s.wr).sum();
    let t = er_operator(k, p, Side::Chain, Basis::Orthonormal, cfg)?;
    let trace_t = t.entries.trace();
    let bt = k.incidence(p).transpose();
    let rank_b_transpose = spectral::rank(&bt, cfg)?;
    let rhs = k.n(p - 1) - spectral::nullity(&bt, cfg)?;
    let target = rhs as f64;
    let pass = (lhs_sum - target).abs() <= tol && (trace_t - target).abs() <= tol;
    Ok(FosterReport {
        p,
        lhs_sum,
        trace_t,
        rank_b_transpose,
        rhs,
        pass,
    })
}

/// Eigenvalues of `T_p` in the orthonormal basis, descending.
pub fn er_operator_spectrum(
    k: &WeightedComplex,
    p: usize,
    cfg: &PseudoinverseConfig,
) -> Result<Vec<f64>> {
    let t = er_operator(k, p, Side::Chain, Basis::Orthonormal, cfg)?.entries;
    let sym = (&t + t.transpose()) * 0.5;
    let mut ev: Vec<f64> = crate::spectral::sym_eigen(&sym).0.iter().copied().collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    Ok(ev)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    /// `d(i, k) - d(i, j) - d(j, k)`
    pub excess: f64,
}

/// Pairwise distances over a labelled point set and every violated triangle
/// inequality beyond `slack`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MetricReport {
    pub labels: Vec<String>,
    pub pairs: Vec<(usize, usize)>,
    pub values: Vec<f64>,
    pub violations: Vec<TriangleViolation>,
}

impl MetricReport {
    pub fn from_distances(labels: Vec<String>, dist: &DMatrix<f64>, slack: f64) -> Self {
        let n = labels.len();
        let mut pairs = Vec::new();
        let mut values = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i, j));
                values.push(dist[(i, j)]);
            }
        }
        let mut violations = Vec::new();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    let excess = dist[(i, l)] - dist[(i, j)] - dist[(j, l)];
                    if excess > slack {
                        violations.push(TriangleViolation { i, j, k: l, excess });
                    }
                }
            }
        }
        MetricReport {
            labels,
            pairs,
            values,
            violations,
        }
    }
}

/// Distances `d_p` between the elementary p-chains.
pub fn chain_metric_report(
    k: &WeightedComplex,
    p: usize,
    slack: f64,
    cfg: &PseudoinverseConfig,
) -> Result<MetricReport> {
    let t = er_operator(k, p, Side::Chain, Basis::Standard, cfg)?.entries;
    let n = k.n(p);
    let mut dist = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            v[j] = -1.0;
            let d = t_norm(k, &t, p, &v);
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }
    let labels = k.simplices(p).iter().map(|s| format!("[{s}]")).collect();
    Ok(MetricReport::from_distances(labels, &dist, slack))
}

/// Distances `d~_p` between sample p-cycles: the vertices when `p = 0`,
/// otherwise the zero cycle and the boundaries of the (p+1)-simplices.
pub fn cycle_metric_report(
    k: &WeightedComplex,
    p: usize,
    slack: f64,
    cfg: &PseudoinverseConfig,
) -> Result<MetricReport> {
    k.check_dim(p, 0, k.dim())?;
    let mut labels = Vec::new();
    let mut points: Vec<DVector<f64>> = Vec::new();
    if p == 0 {
        for (i, s) in k.simplices(0).iter().enumerate() {
            labels.push(format!("[{s}]"));
            let mut v = DVector::zeros(k.n(0));
            v[i] = 1.0;
            points.push(v);
        }
    } else {
        labels.push("0".to_string());
        points.push(DVector::zeros(k.n(p)));
        let b = k.incidence(p + 1);
        for (j, s) in k.simplices(p + 1).iter().enumerate() {
            labels.push(format!("d[{s}]"));
            points.push(b.column(j).into_owned());
        }
    }
    let t = next_operator(k, p, cfg)?;
    let n = points.len();
    let mut dist = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = cycle_distance(k, t.as_ref(), p, &(&points[i] - &points[j]), cfg)?;
            dist[(i, j)] = d;
            dist[(j, i)] = d;
        }
    }
    Ok(MetricReport::from_distances(labels, &dist, slack))
}
