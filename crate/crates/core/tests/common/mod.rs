//! Random inputs and independent oracles shared by the integration tests.
//!
//! Nothing here goes through the crate's pseudoinverse: resistances are
//! recomputed by spanning-forest enumeration or by a constrained energy
//! minimisation on a row-reduced boundary matrix, and ranks are exact.

#![allow(dead_code)]

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use simplicial_resistance::{Basis, WeightedComplex};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn weight(rng: &mut ChaCha8Rng) -> f64 {
    rng.gen_range(0.1..=10.0)
}

fn random_facets(rng: &mut ChaCha8Rng, n: usize, count: usize, max_dim: usize) -> Vec<Vec<u64>> {
    let verts: Vec<u64> = (1..=n as u64).collect();
    let mut facets: Vec<Vec<u64>> = (0..count)
        .map(|_| {
            let size = rng.gen_range(1..=max_dim + 1).min(n);
            verts.choose_multiple(rng, size).copied().collect()
        })
        .collect();
    // keep every vertex so counts do not depend on which were drawn
    for &v in &verts {
        facets.push(vec![v]);
    }
    facets
}

/// Up to `max_vertices` vertices, facets of dimension at most `max_dim`, every
/// simplex weighted uniformly in [0.1, 10].
pub fn random_complex(rng: &mut ChaCha8Rng, max_vertices: usize, max_dim: usize) -> WeightedComplex {
    let n = rng.gen_range(3..=max_vertices);
    let count = rng.gen_range(1..=n);
    let k = WeightedComplex::from_facets(random_facets(rng, n, count, max_dim), []).unwrap();
    k.reweighted(|_| weight(rng)).unwrap()
}

/// The same complex with every weight below dimension `keep_from` set to 1.
pub fn with_unit_weights_below(k: &WeightedComplex, keep_from: usize) -> WeightedComplex {
    let mut facets = Vec::new();
    let mut weights = Vec::new();
    for p in 0..=k.dim() {
        for (s, &w) in k.simplices(p).iter().zip(k.weights(p)) {
            facets.push(s.vertices().to_vec());
            weights.push((s.vertices().to_vec(), if p < keep_from { 1.0 } else { w }));
        }
    }
    WeightedComplex::from_facets(facets, weights).unwrap()
}

/// Connected graph: a random spanning tree plus extra edges, weighted edges,
/// unit vertices.
pub fn random_connected_graph(rng: &mut ChaCha8Rng, max_vertices: usize) -> WeightedComplex {
    let n = rng.gen_range(2..=max_vertices);
    let mut edges = BTreeSet::new();
    for v in 2..=n as u64 {
        let u = rng.gen_range(1..v);
        edges.insert((u, v));
    }
    let extra = rng.gen_range(0..=n);
    for _ in 0..extra {
        let u = rng.gen_range(1..=n as u64);
        let v = rng.gen_range(1..=n as u64);
        if u != v {
            edges.insert((u.min(v), u.max(v)));
        }
    }
    let facets: Vec<Vec<u64>> = edges.iter().map(|&(u, v)| vec![u, v]).collect();
    let weights: Vec<(Vec<u64>, f64)> = edges.iter().map(|&(u, v)| (vec![u, v], weight(rng))).collect();
    WeightedComplex::from_facets(facets, weights).unwrap()
}

/// Cone over a random connected graph with a few extra triangles spanned by
/// existing edges. Contractible cone plus fillings of boundaries, so the first
/// homology vanishes.
pub fn random_acyclic_2_complex(rng: &mut ChaCha8Rng, max_vertices: usize) -> WeightedComplex {
    let g = random_connected_graph(rng, max_vertices);
    let apex = g.n(0) as u64 + 1;
    let mut facets: Vec<Vec<u64>> = g
        .simplices(1)
        .iter()
        .map(|e| vec![e.vertices()[0], e.vertices()[1], apex])
        .collect();
    let edges: BTreeSet<(u64, u64)> = g
        .simplices(1)
        .iter()
        .map(|e| (e.vertices()[0], e.vertices()[1]))
        .collect();
    let n = g.n(0) as u64;
    for a in 1..=n {
        for b in a + 1..=n {
            for c in b + 1..=n {
                if edges.contains(&(a, b)) && edges.contains(&(a, c)) && edges.contains(&(b, c)) && rng.gen_bool(0.5) {
                    facets.push(vec![a, b, c]);
                }
            }
        }
    }
    let k = WeightedComplex::from_facets(facets, []).unwrap();
    k.reweighted(|_| weight(rng)).unwrap()
}

/// Haar-ish orthogonal matrix from the QR factor of a Gaussian-like matrix.
pub fn random_orthogonal(rng: &mut ChaCha8Rng, n: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    g.qr().q()
}

/// `U diag(s) V^T` with `rank` nonzero singular values in [0.1, 10].
pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, rank: usize) -> DMatrix<f64> {
    let u = random_orthogonal(rng, rows);
    let v = random_orthogonal(rng, cols);
    let mut s = DMatrix::zeros(rows, cols);
    for i in 0..rank.min(rows).min(cols) {
        s[(i, i)] = rng.gen_range(0.1..=10.0);
    }
    u * s * v.transpose()
}

pub fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

pub fn boundary(k: &WeightedComplex, p: usize) -> DMatrix<f64> {
    k.boundary_matrix(p, Basis::Standard).unwrap().entries
}

/// Exact rank of an integer matrix, by elimination modulo a large prime.
pub fn integer_rank(m: &DMatrix<f64>) -> usize {
    const P: i64 = 1_000_000_007;
    let (r, c) = m.shape();
    let mut a: Vec<Vec<i64>> = (0..r)
        .map(|i| (0..c).map(|j| (m[(i, j)].round() as i64).rem_euclid(P)).collect())
        .collect();
    let pow = |mut b: i64, mut e: i64| {
        let mut acc = 1i64;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * b % P;
            }
            b = b * b % P;
            e >>= 1;
        }
        acc
    };
    let mut rank = 0;
    for col in 0..c {
        let Some(piv) = (rank..r).find(|&i| a[i][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = pow(a[rank][col], P - 2);
        for i in 0..r {
            if i != rank && a[i][col] != 0 {
                let f = a[i][col] * inv % P;
                for j in col..c {
                    a[i][j] = (a[i][j] - f * a[rank][j]).rem_euclid(P);
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Indices of a maximal independent set of rows of an integer matrix.
fn independent_rows(m: &DMatrix<f64>) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    for i in 0..m.nrows() {
        let mut trial = kept.clone();
        trial.push(i);
        let sub = DMatrix::from_fn(trial.len(), m.ncols(), |a, b| m[(trial[a], b)]);
        if integer_rank(&sub) == trial.len() {
            kept = trial;
        }
    }
    kept
}

/// Thomson's principle: the minimum of `sum a_t^2 / w_t` over p-chains `a`
/// with `B a = beta`. Solved through the Lagrange system on an independent set
/// of rows of `B`, where `B W B^T` is invertible. `None` when `beta` is not a
/// boundary.
pub fn min_energy(b: &DMatrix<f64>, w: &[f64], beta: &DVector<f64>) -> Option<f64> {
    let rows = independent_rows(b);
    let br = DMatrix::from_fn(rows.len(), b.ncols(), |i, j| b[(rows[i], j)]);
    let betar = DVector::from_fn(rows.len(), |i, _| beta[rows[i]]);
    let wd = DMatrix::from_diagonal(&DVector::from_column_slice(w));
    let lap = &br * &wd * br.transpose();
    let lambda = lap.lu().solve(&betar)?;
    let alpha = &wd * br.transpose() * &lambda;
    // rows outside the independent set must be satisfied too
    let scale = beta.norm().max(1.0);
    if (b * &alpha - beta).norm() > 1e-8 * scale {
        return None;
    }
    Some(alpha.iter().zip(w).map(|(a, w)| a * a / w).sum())
}

/// Resistance of a p-simplex by minimum energy.
pub fn simplex_resistance_oracle(k: &WeightedComplex, p: usize, idx: usize) -> f64 {
    let b = boundary(k, p);
    let beta = b.column(idx).into_owned();
    min_energy(&b, k.weights(p), &beta).expect("a face boundary is a boundary")
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

/// Weighted spanning-tree and spanning-2-forest sums of a graph:
/// `r_uv = F_uv / T`, where `T` sums the weight products of spanning trees and
/// `F_uv` those of two-tree spanning forests separating `u` from `v`.
pub fn forest_resistance(n: usize, edges: &[(usize, usize, f64)], u: usize, v: usize) -> f64 {
    let m = edges.len();
    assert!(m <= 20, "enumeration oracle is exponential in the edge count");
    let mut trees = 0.0;
    let mut forests = 0.0;
    for mask in 0u32..(1 << m) {
        let size = mask.count_ones() as usize;
        if size + 2 < n || size + 1 > n {
            continue;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        let mut acyclic = true;
        let mut prod = 1.0;
        for (e, &(a, b, w)) in edges.iter().enumerate() {
            if mask & (1 << e) != 0 {
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    acyclic = false;
                    break;
                }
                parent[ra] = rb;
                prod *= w;
            }
        }
        if !acyclic {
            continue;
        }
        if size + 1 == n {
            trees += prod;
        } else if find(&mut parent, u) != find(&mut parent, v) {
            forests += prod;
        }
    }
    forests / trees
}

/// Edge list with vertex indices of a graph complex.
pub fn edge_list(k: &WeightedComplex) -> Vec<(usize, usize, f64)> {
    k.simplices(1)
        .iter()
        .zip(k.weights(1))
        .map(|(e, &w)| {
            let [a, b] = [e.vertices()[0], e.vertices()[1]];
            (k.vertex_index(a).unwrap(), k.vertex_index(b).unwrap(), w)
        })
        .collect()
}

/// `L^+` of a connected graph Laplacian by `(L + J/n)^{-1} - J/n`.
pub fn connected_laplacian_pinv(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let j = DMatrix::from_element(n, n, 1.0 / n as f64);
    (l + &j).try_inverse().expect("connected graph") - j
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

pub fn mat_rel(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1.0)
}

pub const FIXTURES: [&str; 3] = ["triangle", "filled_triangle", "hollow_tetrahedron"];
pub const GOLDEN_COMMANDS: [&str; 3] = ["foster", "resistance", "equiv-check"];

pub fn data_path(rel: &str) -> std::path::PathBuf {
    std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(rel)
}

/// Runs the `simres` binary with a clean tolerance environment.
pub fn simres(args: &[&str]) -> std::process::Output {
    std::process::Command::new(env!("CARGO_BIN_EXE_simres"))
        .args(args)
        .env_remove("SIMRES_TOL")
        .output()
        .expect("simres runs")
}

/// Output of `simres --input <fixture> <cmd>` against its golden file, twice.
/// Returns a description of every mismatch.
pub fn golden_mismatches() -> Vec<String> {
    let mut bad = Vec::new();
    for fixture in FIXTURES {
        let input = data_path(&format!("{fixture}.txt"));
        let input = input.to_str().unwrap();
        for cmd in GOLDEN_COMMANDS {
            let golden_path = data_path(&format!("golden/{fixture}.{cmd}.txt"));
            let first = simres(&["--input", input, cmd]);
            let second = simres(&["--input", input, cmd]);
            if first.stdout != second.stdout || first.stderr != second.stderr {
                bad.push(format!("{fixture} {cmd}: runs differ"));
            }
            if !first.status.success() {
                bad.push(format!("{fixture} {cmd}: exit {:?}", first.status.code()));
            }
            match std::fs::read(&golden_path) {
                Ok(g) if g == first.stdout => {}
                Ok(_) => bad.push(format!("{fixture} {cmd}: differs from {}", golden_path.display())),
                Err(e) => bad.push(format!("{}: {e}", golden_path.display())),
            }
        }
    }
    bad
}
