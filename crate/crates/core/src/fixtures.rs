//! Small named complexes used in examples and tests.

use crate::complex::WeightedComplex;

fn build(facets: &[&[u64]], weights: Vec<(Vec<u64>, f64)>) -> WeightedComplex {
    WeightedComplex::from_facets(facets.iter().map(|f| f.to_vec()), weights)
        .expect("fixture complexes are well formed")
}

/// A single edge `[1, 2]`.
pub fn path2() -> WeightedComplex {
    build(&[&[1, 2]], vec![])
}

/// A single edge with the given weight.
pub fn weighted_edge(w: f64) -> WeightedComplex {
    build(&[&[1, 2]], vec![(vec![1, 2], w)])
}

/// The cycle graph on vertices 1, 2, 3.
pub fn triangle_graph() -> WeightedComplex {
    build(&[&[1, 2], &[1, 3], &[2, 3]], vec![])
}

/// Same complex as [`triangle_graph`].
pub fn hollow_triangle() -> WeightedComplex {
    triangle_graph()
}

/// The 2-simplex `[1, 2, 3]` with the given face weight.
pub fn filled_triangle(face_weight: f64) -> WeightedComplex {
    build(&[&[1, 2, 3]], vec![(vec![1, 2, 3], face_weight)])
}

/// Boundary of the 3-simplex on vertices 1..=4.
pub fn hollow_tetrahedron() -> WeightedComplex {
    build(&[&[1, 2, 3], &[1, 2, 4], &[1, 3, 4], &[2, 3, 4]], vec![])
}

/// The 3-simplex on vertices 1..=4.
pub fn filled_tetrahedron() -> WeightedComplex {
    build(&[&[1, 2, 3, 4]], vec![])
}
