//! Oriented weighted simplicial complexes and the matrices of their chain and
//! cochain operators.
//!
//! Every p-simplex is stored with its vertices in strictly increasing order,
//! which fixes the standard orientation; the i-th codimension-one face (the one
//! omitting vertex i) enters the boundary with sign (-1)^i. Simplices of each
//! dimension are kept in lexicographic order and that order is the index of the
//! standard basis.
//!
//! Chains carry the inner product `<s, s> = 1 / w(s)`, cochains the dual one
//! `<s^v, s^v> = w(s)`. Matrices are expressed either in the standard bases or in
//! the orthonormal bases `{sqrt(w) s}` and `{s^v / sqrt(w)}`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dense::scale_both;
use crate::error::{Error, Result};

/// An oriented simplex given by its strictly increasing vertex ids.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Simplex(Vec<u64>);

impl Simplex {
    /// Builds a simplex from vertex ids in any order. Repeated vertices are
    /// rejected.
    pub fn new(mut vertices: Vec<u64>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::MalformedFacet("empty vertex list".into()));
        }
        vertices.sort_unstable();
        if vertices.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::MalformedFacet(format!(
                "repeated vertex in {:?}",
                vertices
            )));
        }
        Ok(Simplex(vertices))
    }

    pub fn vertices(&self) -> &[u64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len() - 1
    }

    /// Codimension-one faces paired with their sign in the boundary.
    pub fn faces(&self) -> impl Iterator<Item = (f64, Simplex)> + '_ {
        let n = self.0.len();
        (0..if n > 1 { n } else { 0 }).map(move |i| {
            let mut face = self.0.clone();
            face.remove(i);
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            (sign, Simplex(face))
        })
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for v in &self.0 {
            if !first {
                f.write_str(" ")?;
            }
            write!(f, "{v}")?;
            first = false;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Chain,
    Cochain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Basis {
    Standard,
    Orthonormal,
}

/// One of the four bases of `C_p` / `C^p`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum BasisKind {
    StandardChain,
    StandardCochain,
    OrthoChain,
    OrthoCochain,
}

impl BasisKind {
    pub fn new(side: Side, basis: Basis) -> Self {
        match (side, basis) {
            (Side::Chain, Basis::Standard) => BasisKind::StandardChain,
            (Side::Cochain, Basis::Standard) => BasisKind::StandardCochain,
            (Side::Chain, Basis::Orthonormal) => BasisKind::OrthoChain,
            (Side::Cochain, Basis::Orthonormal) => BasisKind::OrthoCochain,
        }
    }

    pub fn side(self) -> Side {
        match self {
            BasisKind::StandardChain | BasisKind::OrthoChain => Side::Chain,
            BasisKind::StandardCochain | BasisKind::OrthoCochain => Side::Cochain,
        }
    }

    pub fn basis(self) -> Basis {
        match self {
            BasisKind::StandardChain | BasisKind::StandardCochain => Basis::Standard,
            BasisKind::OrthoChain | BasisKind::OrthoCochain => Basis::Orthonormal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct BasisTag {
    pub dim: usize,
    pub kind: BasisKind,
}

impl BasisTag {
    pub fn new(dim: usize, side: Side, basis: Basis) -> Self {
        BasisTag {
            dim,
            kind: BasisKind::new(side, basis),
        }
    }

    pub fn chain(dim: usize) -> Self {
        Self::new(dim, Side::Chain, Basis::Standard)
    }

    pub fn cochain(dim: usize) -> Self {
        Self::new(dim, Side::Cochain, Basis::Standard)
    }

    pub fn side(self) -> Side {
        self.kind.side()
    }

    pub fn basis(self) -> Basis {
        self.kind.basis()
    }

    pub fn with_basis(self, basis: Basis) -> Self {
        Self::new(self.dim, self.side(), basis)
    }

    pub fn with_side(self, side: Side) -> Self {
        Self::new(self.dim, side, self.basis())
    }
}

impl fmt::Display for BasisTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b = match self.basis() {
            Basis::Standard => "standard",
            Basis::Orthonormal => "orthonormal",
        };
        match self.side() {
            Side::Chain => write!(f, "{b} basis of C_{}", self.dim),
            Side::Cochain => write!(f, "{b} basis of C^{}", self.dim),
        }
    }
}

/// A p-chain or p-cochain, depending on its basis tag.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainVec {
    pub basis: BasisTag,
    pub coeffs: DVector<f64>,
}

impl ChainVec {
    pub fn new(basis: BasisTag, coeffs: DVector<f64>) -> Self {
        ChainVec { basis, coeffs }
    }

    pub fn from_slice(basis: BasisTag, coeffs: &[f64]) -> Self {
        Self::new(basis, DVector::from_column_slice(coeffs))
    }

    pub fn zeros(basis: BasisTag, len: usize) -> Self {
        Self::new(basis, DVector::zeros(len))
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.basis, &self.coeffs * s)
    }

    fn same_basis(&self, other: &ChainVec) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::BasisMismatch {
                expected: self.basis.to_string(),
                found: other.basis.to_string(),
            });
        }
        if self.coeffs.len() != other.coeffs.len() {
            return Err(Error::LengthMismatch {
                expected: self.coeffs.len(),
                found: other.coeffs.len(),
            });
        }
        Ok(())
    }

    pub fn checked_add(&self, other: &ChainVec) -> Result<ChainVec> {
        self.same_basis(other)?;
        Ok(Self::new(self.basis, &self.coeffs + &other.coeffs))
    }

    pub fn checked_sub(&self, other: &ChainVec) -> Result<ChainVec> {
        self.same_basis(other)?;
        Ok(Self::new(self.basis, &self.coeffs - &other.coeffs))
    }
}

/// A dense matrix together with the bases of its domain and codomain
/// (`codomain size x domain size`).
#[derive(Debug, Clone, PartialEq)]
pub struct OpMatrix {
    pub domain: BasisTag,
    pub codomain: BasisTag,
    pub entries: DMatrix<f64>,
}

impl OpMatrix {
    pub fn new(domain: BasisTag, codomain: BasisTag, entries: DMatrix<f64>) -> Self {
        OpMatrix {
            domain,
            codomain,
            entries,
        }
    }

    pub fn apply(&self, v: &ChainVec) -> Result<ChainVec> {
        if v.basis != self.domain {
            return Err(Error::BasisMismatch {
                expected: self.domain.to_string(),
                found: v.basis.to_string(),
            });
        }
        if v.coeffs.len() != self.entries.ncols() {
            return Err(Error::LengthMismatch {
                expected: self.entries.ncols(),
                found: v.coeffs.len(),
            });
        }
        Ok(ChainVec::new(self.codomain, &self.entries * &v.coeffs))
    }
}

#[derive(Debug, Clone, PartialEq)]
struct Level {
    simplices: Vec<Simplex>,
    weights: Vec<f64>,
    index: HashMap<Simplex, usize>,
}

/// A finite simplicial complex, closed under faces, with a positive weight on
/// every simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedComplex {
    levels: Vec<Level>,
}

impl WeightedComplex {
    /// Builds the downward closure of `facets`. Simplices absent from `weights`
    /// get weight 1; weights may be given for any simplex of the closure.
    pub fn from_facets<F, W>(facets: F, weights: W) -> Result<Self>
    where
        F: IntoIterator<Item = Vec<u64>>,
        W: IntoIterator<Item = (Vec<u64>, f64)>,
    {
        let mut sets: Vec<BTreeSet<Simplex>> = Vec::new();
        for facet in facets {
            let s = Simplex::new(facet)?;
            let verts = s.vertices();
            let k = verts.len();
            if k > 24 {
                return Err(Error::MalformedFacet(format!(
                    "facet of dimension {} is too large",
                    k - 1
                )));
            }
            if sets.len() < k {
                sets.resize_with(k, BTreeSet::new);
            }
            for mask in 1u32..(1u32 << k) {
                let sub: Vec<u64> = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| verts[i])
                    .collect();
                sets[sub.len() - 1].insert(Simplex(sub));
            }
        }
        if sets.is_empty() {
            return Err(Error::EmptyComplex);
        }
        let mut levels: Vec<Level> = sets
            .into_iter()
            .map(|set| {
                let simplices: Vec<Simplex> = set.into_iter().collect();
                let index = simplices
                    .iter()
                    .enumerate()
                    .map(|(i, s)| (s.clone(), i))
                    .collect();
                let weights = vec![1.0; simplices.len()];
                Level {
                    simplices,
                    weights,
                    index,
                }
            })
            .collect();
        for (verts, w) in weights {
            let s = Simplex::new(verts)?;
            check_weight(&s, w)?;
            let p = s.dim();
            let idx = levels
                .get(p)
                .and_then(|l| l.index.get(&s).copied())
                .ok_or_else(|| Error::SimplexNotFound(s.to_string()))?;
            levels[p].weights[idx] = w;
        }
        Ok(WeightedComplex { levels })
    }

    /// Same simplices, weights replaced by `f(simplex)`.
    pub fn reweighted<F>(&self, mut f: F) -> Result<Self>
    where
        F: FnMut(&Simplex) -> f64,
    {
        let mut out = self.clone();
        for level in &mut out.levels {
            for (s, w) in level.simplices.iter().zip(level.weights.iter_mut()) {
                let nw = f(s);
                check_weight(s, nw)?;
                *w = nw;
            }
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.levels.len() - 1
    }

    /// Number of p-simplices (zero above the top dimension).
    pub fn n(&self, p: usize) -> usize {
        self.levels.get(p).map_or(0, |l| l.simplices.len())
    }

    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.simplices.len()).collect()
    }

    pub fn simplices(&self, p: usize) -> &[Simplex] {
        self.levels.get(p).map_or(&[], |l| &l.simplices)
    }

    pub fn weights(&self, p: usize) -> &[f64] {
        self.levels.get(p).map_or(&[], |l| &l.weights)
    }

    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.levels.get(s.dim())?.index.get(s).copied()
    }

    pub fn weight(&self, s: &Simplex) -> Option<f64> {
        self.index_of(s).map(|i| self.levels[s.dim()].weights[i])
    }

    pub fn vertex_ids(&self) -> Vec<u64> {
        self.simplices(0).iter().map(|s| s.vertices()[0]).collect()
    }

    /// Position of a vertex id in the standard basis of `C_0`.
    pub fn vertex_index(&self, v: u64) -> Option<usize> {
        self.levels[0].index.get(&Simplex(vec![v])).copied()
    }

    /// Whether every vertex has weight exactly one.
    pub fn has_unit_vertex_weights(&self) -> bool {
        self.weights(0).iter().all(|&w| w == 1.0)
    }

    /// Whether every simplex of dimension `p` has weight exactly one.
    pub fn has_unit_weights(&self, p: usize) -> bool {
        self.weights(p).iter().all(|&w| w == 1.0)
    }

    pub(crate) fn check_dim(&self, p: usize, min: usize, max: usize) -> Result<()> {
        if p < min || p > max || max < min {
            return Err(Error::DimOutOfRange { p, min, max });
        }
        Ok(())
    }

    /// `w_p^power` as a vector; empty above the top dimension.
    pub(crate) fn weight_vec(&self, p: usize, power: f64) -> DVector<f64> {
        DVector::from_iterator(
            self.n(p),
            self.weights(p).iter().map(|w| {
                if power == 1.0 {
                    *w
                } else if power == -1.0 {
                    1.0 / w
                } else {
                    w.powf(power)
                }
            }),
        )
    }

    /// Integer incidence matrix `B_p` (`n_{p-1} x n_p`) for `0 <= p <= dim + 1`,
    /// with the degenerate sizes `0 x n_0` at `p = 0` and `n_dim x 0` above.
    pub(crate) fn incidence(&self, p: usize) -> DMatrix<f64> {
        let rows = if p == 0 { 0 } else { self.n(p - 1) };
        let cols = self.n(p);
        let mut b = DMatrix::zeros(rows, cols);
        if p == 0 {
            return b;
        }
        let lower = &self.levels[p - 1].index;
        for (j, s) in self.simplices(p).iter().enumerate() {
            for (sign, face) in s.faces() {
                b[(lower[&face], j)] = sign;
            }
        }
        b
    }

    /// Matrix of the boundary `d_p : C_p -> C_{p-1}`.
    pub fn boundary_matrix(&self, p: usize, basis: Basis) -> Result<OpMatrix> {
        self.check_dim(p, 1, self.dim())?;
        let b = self.incidence(p);
        let entries = match basis {
            Basis::Standard => b,
            Basis::Orthonormal => {
                scale_both(&self.weight_vec(p - 1, -0.5), &b, &self.weight_vec(p, 0.5))
            }
        };
        Ok(OpMatrix::new(
            BasisTag::new(p, Side::Chain, basis),
            BasisTag::new(p - 1, Side::Chain, basis),
            entries,
        ))
    }

    /// Matrix of the coboundary `delta_p : C^p -> C^{p+1}`.
    pub fn coboundary_matrix(&self, p: usize, basis: Basis) -> Result<OpMatrix> {
        if self.dim() == 0 {
            return Err(Error::DimOutOfRange { p, min: 0, max: 0 });
        }
        self.check_dim(p, 0, self.dim() - 1)?;
        let bt = self.incidence(p + 1).transpose();
        let entries = match basis {
            Basis::Standard => bt,
            Basis::Orthonormal => {
                scale_both(&self.weight_vec(p + 1, 0.5), &bt, &self.weight_vec(p, -0.5))
            }
        };
        Ok(OpMatrix::new(
            BasisTag::new(p, Side::Cochain, basis),
            BasisTag::new(p + 1, Side::Cochain, basis),
            entries,
        ))
    }

    /// Matrix of the adjoint boundary `d_p^* : C_{p-1} -> C_p`.
    pub fn adjoint_boundary_matrix(&self, p: usize, basis: Basis) -> Result<OpMatrix> {
        self.check_dim(p, 1, self.dim())?;
        let bt = self.incidence(p).transpose();
        let entries = match basis {
            Basis::Standard => {
                scale_both(&self.weight_vec(p, 1.0), &bt, &self.weight_vec(p - 1, -1.0))
            }
            Basis::Orthonormal => {
                scale_both(&self.weight_vec(p, 0.5), &bt, &self.weight_vec(p - 1, -0.5))
            }
        };
        Ok(OpMatrix::new(
            BasisTag::new(p - 1, Side::Chain, basis),
            BasisTag::new(p, Side::Chain, basis),
            entries,
        ))
    }

    /// Matrix of the adjoint coboundary `delta_p^* : C^{p+1} -> C^p`.
    pub fn adjoint_coboundary_matrix(&self, p: usize, basis: Basis) -> Result<OpMatrix> {
        if self.dim() == 0 {
            return Err(Error::DimOutOfRange { p, min: 0, max: 0 });
        }
        self.check_dim(p, 0, self.dim() - 1)?;
        let b = self.incidence(p + 1);
        let entries = match basis {
            Basis::Standard => {
                scale_both(&self.weight_vec(p, -1.0), &b, &self.weight_vec(p + 1, 1.0))
            }
            Basis::Orthonormal => {
                scale_both(&self.weight_vec(p, -0.5), &b, &self.weight_vec(p + 1, 0.5))
            }
        };
        Ok(OpMatrix::new(
            BasisTag::new(p + 1, Side::Cochain, basis),
            BasisTag::new(p, Side::Cochain, basis),
            entries,
        ))
    }

    /// Diagonal of the Gram matrix of the given basis.
    pub(crate) fn gram_diag(&self, tag: BasisTag) -> DVector<f64> {
        match tag.kind {
            BasisKind::StandardChain => self.weight_vec(tag.dim, -1.0),
            BasisKind::StandardCochain => self.weight_vec(tag.dim, 1.0),
            BasisKind::OrthoChain | BasisKind::OrthoCochain => {
                DVector::from_element(self.n(tag.dim), 1.0)
            }
        }
    }

    /// Gram matrix of the inner product on `C_p` or `C^p`.
    pub fn gram_matrix(&self, p: usize, side: Side, basis: Basis) -> Result<OpMatrix> {
        self.check_dim(p, 0, self.dim())?;
        let tag = BasisTag::new(p, side, basis);
        Ok(OpMatrix::new(
            tag,
            tag,
            DMatrix::from_diagonal(&self.gram_diag(tag)),
        ))
    }

    /// Matrix of the flat isomorphism `C_p -> C^p`.
    pub fn flat_matrix(&self, p: usize, basis: Basis) -> Result<OpMatrix> {
        self.check_dim(p, 0, self.dim())?;
        let d = match basis {
            Basis::Standard => self.weight_vec(p, -1.0),
            Basis::Orthonormal => DVector::from_element(self.n(p), 1.0),
        };
        Ok(OpMatrix::new(
            BasisTag::new(p, Side::Chain, basis),
            BasisTag::new(p, Side::Cochain, basis),
            DMatrix::from_diagonal(&d),
        ))
    }

    /// Matrix of the sharp isomorphism `C^p -> C_p`.
    pub fn sharp_matrix(&self, p: usize, basis: Basis) -> Result<OpMatrix> {
        self.check_dim(p, 0, self.dim())?;
        let d = match basis {
            Basis::Standard => self.weight_vec(p, 1.0),
            Basis::Orthonormal => DVector::from_element(self.n(p), 1.0),
        };
        Ok(OpMatrix::new(
            BasisTag::new(p, Side::Cochain, basis),
            BasisTag::new(p, Side::Chain, basis),
            DMatrix::from_diagonal(&d),
        ))
    }

    /// Checks that `v` has the length of its basis.
    pub fn check_vec(&self, v: &ChainVec) -> Result<()> {
        self.check_dim(v.dim(), 0, self.dim())?;
        let n = self.n(v.dim());
        if v.coeffs.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: v.coeffs.len(),
            });
        }
        Ok(())
    }

    /// Coordinates of `v` in another basis on the same side.
    pub fn change_of_basis(&self, v: &ChainVec, target: BasisTag) -> Result<ChainVec> {
        self.check_vec(v)?;
        if v.basis.side() != target.side() {
            return Err(Error::SideMismatch {
                from: v.basis.to_string(),
                to: target.to_string(),
            });
        }
        if v.basis.dim != target.dim {
            return Err(Error::BasisMismatch {
                expected: target.to_string(),
                found: v.basis.to_string(),
            });
        }
        if v.basis == target {
            return Ok(v.clone());
        }
        let p = v.dim();
        // standard -> orthonormal is W^{-1/2} on chains and W^{1/2} on cochains
        let power = match (v.basis.kind, target.kind) {
            (BasisKind::StandardChain, BasisKind::OrthoChain) => -0.5,
            (BasisKind::OrthoChain, BasisKind::StandardChain) => 0.5,
            (BasisKind::StandardCochain, BasisKind::OrthoCochain) => 0.5,
            (BasisKind::OrthoCochain, BasisKind::StandardCochain) => -0.5,
            _ => unreachable!("same side, different basis"),
        };
        let d = self.weight_vec(p, power);
        Ok(ChainVec::new(target, v.coeffs.component_mul(&d)))
    }

    /// Converts to the standard basis of the same side.
    pub fn to_standard(&self, v: &ChainVec) -> Result<ChainVec> {
        self.change_of_basis(v, v.basis.with_basis(Basis::Standard))
    }

    /// Flat isomorphism applied to a chain; the result uses the matching
    /// cochain basis.
    pub fn flat(&self, v: &ChainVec) -> Result<ChainVec> {
        self.check_vec(v)?;
        if v.basis.side() != Side::Chain {
            return Err(Error::SideMismatch {
                from: v.basis.to_string(),
                to: v.basis.with_side(Side::Chain).to_string(),
            });
        }
        self.flat_matrix(v.dim(), v.basis.basis())?.apply(v)
    }

    /// Sharp isomorphism applied to a cochain.
    pub fn sharp(&self, v: &ChainVec) -> Result<ChainVec> {
        self.check_vec(v)?;
        if v.basis.side() != Side::Cochain {
            return Err(Error::SideMismatch {
                from: v.basis.to_string(),
                to: v.basis.with_side(Side::Cochain).to_string(),
            });
        }
        self.sharp_matrix(v.dim(), v.basis.basis())?.apply(v)
    }

    /// `u^T G v` with the Gram matrix of the shared basis.
    pub fn inner_product(&self, u: &ChainVec, v: &ChainVec) -> Result<f64> {
        self.check_vec(u)?;
        if u.basis != v.basis {
            return Err(Error::BasisMismatch {
                expected: u.basis.to_string(),
                found: v.basis.to_string(),
            });
        }
        self.check_vec(v)?;
        let g = self.gram_diag(u.basis);
        Ok(crate::dense::weighted_dot(&u.coeffs, &g, &v.coeffs))
    }

    pub fn norm(&self, v: &ChainVec) -> Result<f64> {
        Ok(self.inner_product(v, v)?.max(0.0).sqrt())
    }

    /// The elementary chain of a simplex in the standard chain basis.
    pub fn elementary(&self, s: &Simplex) -> Result<ChainVec> {
        let idx = self
            .index_of(s)
            .ok_or_else(|| Error::SimplexNotFound(s.to_string()))?;
        let mut v = ChainVec::zeros(BasisTag::chain(s.dim()), self.n(s.dim()));
        v.coeffs[idx] = 1.0;
        Ok(v)
    }
}

fn check_weight(s: &Simplex, w: f64) -> Result<()> {
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::NonPositiveWeight {
            simplex: s.to_string(),
            weight: w,
        });
    }
    Ok(())
}
