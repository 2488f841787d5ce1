mod common;

use common::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use simplicial_resistance::circuits::{self, CircuitProblem, GeneratorAttachment};
use simplicial_resistance::io::{parse_complex_str, write_complex};
use simplicial_resistance::laplacian::{betti_numbers, hodge_decompose};
use simplicial_resistance::metrics::{chain_pseudometric, cycle_metric, er_operator_spectrum};
use simplicial_resistance::resistance::{
    self, bilinear_form, black_maxwell_er, er_bilinear_matrix, er_of_chain, er_of_cochain, er_operator,
    kook_lee_matrix, osting_matrix, vertex_er, CycleResistance,
};
use simplicial_resistance::spectral::{null_basis, PseudoinverseConfig};
use simplicial_resistance::{Basis, BasisTag, ChainVec, Side, WeightedComplex};

fn cfg() -> PseudoinverseConfig {
    PseudoinverseConfig::default()
}

fn small_complex(seed: u64) -> WeightedComplex {
    random_complex(&mut rng(seed), 12, 3)
}

fn chain(p: usize, v: DVector<f64>) -> ChainVec {
    ChainVec::new(BasisTag::chain(p), v)
}

/// Random cycle in `ker d_p`, zero when the kernel is trivial.
fn random_cycle(k: &WeightedComplex, p: usize, seed: u64) -> DVector<f64> {
    let z = null_basis(&boundary(k, p), &cfg()).unwrap();
    let c = random_vec(&mut rng(seed), z.ncols());
    z * c
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn euler_poincare(seed in any::<u64>()) {
        let k = small_complex(seed);
        let betti = betti_numbers(&k, &cfg()).unwrap();
        let sign = |p: usize| if p % 2 == 0 { 1i64 } else { -1 };
        let chi_b: i64 = betti.iter().enumerate().map(|(p, &b)| sign(p) * b as i64).sum();
        let chi_n: i64 = k.counts().iter().enumerate().map(|(p, &n)| sign(p) * n as i64).sum();
        prop_assert_eq!(chi_b, chi_n);
        // and the Betti numbers agree with exact ranks
        for p in 0..=k.dim() {
            let rank_p = if p == 0 { 0 } else { integer_rank(&boundary(&k, p)) };
            let rank_next = if p == k.dim() { 0 } else { integer_rank(&boundary(&k, p + 1)) };
            prop_assert_eq!(betti[p], k.n(p) - rank_p - rank_next);
        }
    }

    #[test]
    fn er_operator_is_an_orthogonal_projection(seed in any::<u64>()) {
        let k = small_complex(seed);
        let mut r = rng(seed ^ 1);
        for p in 1..=k.dim() {
            let t = er_operator(&k, p, Side::Chain, Basis::Standard, &cfg()).unwrap().entries;
            let winv = DMatrix::from_diagonal(&DVector::from_iterator(k.n(p), k.weights(p).iter().map(|w| 1.0 / w)));
            let gt = &winv * &t;
            prop_assert!(mat_rel(&gt.transpose(), &gt) <= 1e-9);
            prop_assert!(mat_rel(&(&t * &t), &t) <= 1e-9);
            let z = random_cycle(&k, p, seed ^ 2);
            prop_assert!((&t * &z).norm() <= 1e-9 * z.norm().max(1.0));
            let y = random_vec(&mut r, k.n(p - 1));
            let dy = k.adjoint_boundary_matrix(p, Basis::Standard).unwrap().entries * y;
            prop_assert!((&t * &dy - &dy).norm() <= 1e-9 * dy.norm().max(1.0));
        }
    }

    #[test]
    fn bilinear_form_is_symmetric_psd_and_boundary_dependent(seed in any::<u64>()) {
        let k = small_complex(seed);
        let mut r = rng(seed ^ 3);
        for p in 1..=k.dim() {
            let a = chain(p, random_vec(&mut r, k.n(p)));
            let b = chain(p, random_vec(&mut r, k.n(p)));
            let rab = bilinear_form(&k, &a, &b, &cfg()).unwrap();
            let rba = bilinear_form(&k, &b, &a, &cfg()).unwrap();
            prop_assert!(rel(rab, rba) <= 1e-9);
            let raa = er_of_chain(&k, &a, &cfg()).unwrap();
            prop_assert!(raa >= -1e-10);
            prop_assert!(rel(raa, bilinear_form(&k, &a, &a, &cfg()).unwrap()) <= 1e-9);
            // norm form
            let t = er_operator(&k, p, Side::Chain, Basis::Standard, &cfg()).unwrap();
            let ta = t.apply(&a).unwrap();
            prop_assert!(rel(raa, k.norm(&ta).unwrap().powi(2)) <= 1e-9);
            // adding a cycle changes nothing
            let z = chain(p, random_cycle(&k, p, seed ^ 4));
            let shifted = a.checked_add(&z).unwrap();
            prop_assert!(rel(er_of_chain(&k, &shifted, &cfg()).unwrap(), raa) <= 1e-9);
            // cochain side
            let f = k.flat(&a).unwrap();
            prop_assert!(rel(er_of_cochain(&k, &f, &cfg()).unwrap(), raa) <= 1e-9);
            // orthonormal coordinates describe the same form
            let ao = k.change_of_basis(&a, a.basis.with_basis(Basis::Orthonormal)).unwrap();
            prop_assert!(rel(er_of_chain(&k, &ao, &cfg()).unwrap(), raa) <= 1e-9);
        }
    }

    #[test]
    fn osting_matches_bilinear_for_any_lower_weights(seed in any::<u64>()) {
        let k = small_complex(seed);
        for p in 1..=k.dim() {
            let bil = er_bilinear_matrix(&k, p, Basis::Standard, &cfg()).unwrap().entries;
            let ost = osting_matrix(&k, p, &cfg()).unwrap().entries;
            prop_assert!(mat_rel(&ost, &bil) <= 1e-9, "p={} dev={}", p, mat_rel(&ost, &bil));
            let unit = with_unit_weights_below(&k, p);
            let bil_u = er_bilinear_matrix(&unit, p, Basis::Standard, &cfg()).unwrap().entries;
            prop_assert!(mat_rel(&bil_u, &bil) <= 1e-9);
        }
    }

    #[test]
    fn black_maxwell_agrees_on_boundaries(seed in any::<u64>()) {
        let k = small_complex(seed);
        let mut r = rng(seed ^ 5);
        for p in 1..=k.dim() {
            let x = chain(p, random_vec(&mut r, k.n(p)));
            let gamma = chain(p - 1, boundary(&k, p) * &x.coeffs);
            let rx = er_of_chain(&k, &x, &cfg()).unwrap();
            match black_maxwell_er(&k, &gamma, &cfg()).unwrap() {
                CycleResistance::Finite(v) => prop_assert!(rel(v, rx) <= 1e-9),
                CycleResistance::NotABoundary => prop_assert!(false, "boundary reported as non-boundary"),
            }
        }
    }

    #[test]
    fn spectrum_is_zero_or_one(seed in any::<u64>()) {
        let k = small_complex(seed);
        for p in 1..=k.dim() {
            for ev in er_operator_spectrum(&k, p, &cfg()).unwrap() {
                prop_assert!(ev.abs() <= 1e-8 || (ev - 1.0).abs() <= 1e-8, "eigenvalue {}", ev);
            }
        }
    }

    #[test]
    fn graph_edges_match_vertex_resistance(seed in any::<u64>()) {
        let g = random_connected_graph(&mut rng(seed), 7);
        let edges = edge_list(&g);
        for (i, e) in g.simplices(1).iter().enumerate() {
            let (u, v) = (e.vertices()[0], e.vertices()[1]);
            let (r, wr) = resistance::er_of_simplex(&g, e, &cfg()).unwrap();
            prop_assert!(rel(r, vertex_er(&g, u, v, &cfg()).unwrap()) <= 1e-9);
            prop_assert!(rel(wr, g.weights(1)[i] * r) <= 1e-12);
            if edges.len() <= 14 {
                let oracle = forest_resistance(g.n(0), &edges, edges[i].0, edges[i].1);
                prop_assert!(rel(r, oracle) <= 1e-9, "r={} oracle={}", r, oracle);
            }
        }
    }

    #[test]
    fn potential_gives_vertex_resistance(seed in any::<u64>()) {
        let g = random_connected_graph(&mut rng(seed), 10);
        let ids = g.vertex_ids();
        let (u, v) = (ids[0], ids[ids.len() - 1]);
        let prob = CircuitProblem::terminals(&g, u, v).unwrap();
        let sol = circuits::solve_circuit(&prob, &cfg()).unwrap();
        let pairing = sol.phi.coeffs.dot(&prob.beta.coeffs);
        prop_assert!(rel(pairing, vertex_er(&g, u, v, &cfg()).unwrap()) <= 1e-9);
        // and equals the energy of any current with that boundary
        let alpha = &sol.alpha;
        prop_assert!(rel(er_of_chain(&g, alpha, &cfg()).unwrap(), pairing) <= 1e-9);
        let z = chain(1, random_cycle(&g, 1, seed));
        prop_assert!(rel(er_of_chain(&g, &alpha.checked_add(&z).unwrap(), &cfg()).unwrap(), pairing) <= 1e-9);
    }

    #[test]
    fn kook_lee_on_acyclic_two_complexes(seed in any::<u64>()) {
        let k = random_acyclic_2_complex(&mut rng(seed), 6);
        prop_assert_eq!(betti_numbers(&k, &cfg()).unwrap()[1], 0);
        let ost = osting_matrix(&k, 2, &cfg()).unwrap().entries;
        let kl = kook_lee_matrix(&k, 2, &cfg()).unwrap().entries;
        prop_assert!(mat_rel(&kl, &ost) <= 1e-8);
        let b2 = boundary(&k, 2);
        let kernel = null_basis(&b2, &cfg()).unwrap();
        let winv: Vec<f64> = k.weights(2).iter().map(|w| 1.0 / w).collect();
        // generators parallel to existing faces, and on new triangles whose
        // boundary is a cycle of the complex
        let mut gens: Vec<GeneratorAttachment> = (0..k.n(2))
            .map(|i| {
                let mut c = DVector::zeros(k.n(2));
                c[i] = -1.0;
                GeneratorAttachment::new(k.simplices(2)[i].vertices().to_vec(), chain(2, c), 1.0).unwrap()
            })
            .collect();
        let ids = k.vertex_ids();
        'outer: for a in 0..ids.len() {
            for b in a + 1..ids.len() {
                for c in b + 1..ids.len() {
                    let tri = vec![ids[a], ids[b], ids[c]];
                    let s = simplicial_resistance::Simplex::new(tri.clone()).unwrap();
                    if k.index_of(&s).is_some() {
                        continue;
                    }
                    if let Ok(gen) = GeneratorAttachment::find(&k, tri, 2.5, &cfg()) {
                        gens.push(gen);
                        if gens.len() > k.n(2) + 3 {
                            break 'outer;
                        }
                    }
                }
            }
        }
        for gen in &gens {
            let res = circuits::kook_lee_resistance(&k, gen, &cfg()).unwrap();
            let expect = gen.c.coeffs.dot(&(&ost * &gen.c.coeffs));
            prop_assert!(rel(res.r_prime, expect) <= 1e-8, "r'={} R={}", res.r_prime, expect);
            let ix = res.current_on_x();
            for j in 0..kernel.ncols() {
                let z = kernel.column(j);
                let ip: f64 = ix.iter().zip(z.iter()).zip(&winv).map(|((a, b), w)| a * b * w).sum();
                prop_assert!(ip.abs() <= 1e-9 * ix.norm().max(1.0));
            }
        }
    }

    #[test]
    fn chain_pseudometric_axioms(seed in any::<u64>()) {
        let k = small_complex(seed);
        let mut r = rng(seed ^ 6);
        for p in 1..=k.dim() {
            let [a, b, c] = [0, 1, 2].map(|_| chain(p, random_vec(&mut r, k.n(p))));
            let d = |x: &ChainVec, y: &ChainVec| chain_pseudometric(&k, x, y, &cfg()).unwrap();
            let (ab, bc, ac) = (d(&a, &b), d(&b, &c), d(&a, &c));
            prop_assert!(ab >= 0.0 && d(&a, &a) <= 1e-12);
            prop_assert!(rel(ab, d(&b, &a)) <= 1e-12);
            prop_assert!(ac <= ab + bc + 1e-9);
            // d^2 is the resistance of the difference
            let diff = a.checked_sub(&b).unwrap();
            prop_assert!(rel(ab * ab, er_of_chain(&k, &diff, &cfg()).unwrap()) <= 1e-9);
        }
    }

    #[test]
    fn cycle_metric_on_graphs(seed in any::<u64>()) {
        let g = random_connected_graph(&mut rng(seed), 10);
        let n = g.n(0);
        let point = |i: usize| {
            let mut v = DVector::zeros(n);
            v[i] = 1.0;
            chain(0, v)
        };
        for i in 0..n {
            for j in 0..n {
                let d = cycle_metric(&g, &point(i), &point(j), &cfg()).unwrap();
                if i == j {
                    prop_assert_eq!(d, 0.0);
                } else {
                    let ids = g.vertex_ids();
                    let r = vertex_er(&g, ids[i], ids[j], &cfg()).unwrap();
                    prop_assert!(d > 1e-8);
                    prop_assert!(rel(d * d, r) <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn hodge_parts_are_orthogonal_and_reassemble(seed in any::<u64>()) {
        let k = small_complex(seed);
        let mut r = rng(seed ^ 7);
        for p in 0..=k.dim() {
            for basis in [Basis::Standard, Basis::Orthonormal] {
                let f = ChainVec::new(BasisTag::new(p, Side::Cochain, basis), random_vec(&mut r, k.n(p)));
                let h = hodge_decompose(&k, &f, &cfg()).unwrap();
                let sum = h.im_delta_star.checked_add(&h.harmonic).unwrap().checked_add(&h.im_delta).unwrap();
                prop_assert!((&sum.coeffs - &f.coeffs).norm() <= 1e-9 * f.coeffs.norm().max(1.0));
                let parts = [&h.im_delta_star, &h.harmonic, &h.im_delta];
                for x in 0..3 {
                    for y in x + 1..3 {
                        let ip = k.inner_product(parts[x], parts[y]).unwrap();
                        prop_assert!(ip.abs() <= 1e-9 * k.norm(&f).unwrap().powi(2).max(1.0));
                    }
                }
            }
        }
    }

    #[test]
    fn text_format_round_trip(seed in any::<u64>()) {
        let k = small_complex(seed);
        let back = parse_complex_str(&write_complex(&k)).unwrap();
        prop_assert_eq!(back, k);
    }
}

#[test]
fn lower_weights_drop_out_of_the_bilinear_form() {
    // a filled triangle with heavy and light edges: the face resistance only
    // sees the face weight
    let k = WeightedComplex::from_facets(
        vec![vec![1, 2, 3]],
        [(vec![1, 2], 7.0), (vec![1, 3], 0.2), (vec![2, 3], 3.0), (vec![1, 2, 3], 2.0)],
    )
    .unwrap();
    let bil = er_bilinear_matrix(&k, 2, Basis::Standard, &cfg()).unwrap().entries;
    assert!((bil[(0, 0)] - 0.5).abs() < 1e-12);
    let ost = osting_matrix(&k, 2, &cfg()).unwrap().entries;
    assert!((ost[(0, 0)] - 0.5).abs() < 1e-12);
    assert!((simplex_resistance_oracle(&k, 2, 0) - 0.5).abs() < 1e-12);
}
