//! Small named formations used throughout the tests, the guide and the CLI.
//!
//! Vertex labels in the comments are 1-based; the library indices are one
//! less.

use crate::geometry::{Configuration, DirectedFormation};
use crate::graph::DirectedGraph;

fn build(n: usize, edges: &[(usize, usize)], points: &[[f64; 2]]) -> DirectedFormation {
    let graph = DirectedGraph::from_one_based(n, edges).expect("fixture graph is valid");
    let points: Vec<Vec<f64>> = points.iter().map(|p| p.to_vec()).collect();
    let config = Configuration::new(2, &points).expect("fixture configuration is valid");
    DirectedFormation::new(graph, config).expect("fixture formation is valid")
}

const TRIANGLE: [[f64; 2]; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

/// Agent positions of the four-agent cyclic example.
pub const GA_POSITIONS: [[f64; 2]; 4] = [
    [5.8009, 0.1698],
    [1.2086, 8.6271],
    [4.8430, 8.4486],
    [2.0941, 5.5229],
];

/// Edges (1-based) of the four-agent cyclic example: the 4-cycle
/// 1 -> 4 -> 3 -> 2 -> 1 plus the chord 4 -> 2.
///
/// This is the unique orientation of a 5-edge graph on four labelled
/// vertices whose bearing Laplacian at [`GA_POSITIONS`] has the spectrum
/// `{0, 0, 0, 1.6400 ± 0.7564i, 0.8879 ± 0.3799i, -0.0559}`.
pub const GA_EDGES: [(usize, usize); 5] = [(2, 1), (1, 4), (4, 3), (3, 2), (4, 2)];

/// Single edge 1 -> 2 with `p = ((0,0), (1,0))`.
pub fn e2() -> DirectedFormation {
    build(2, &[(1, 2)], &[[0.0, 0.0], [1.0, 0.0]])
}

/// Leader-first-follower triangle: 2 -> 1, 3 -> 1, 3 -> 2.
pub fn t3() -> DirectedFormation {
    build(3, &[(2, 1), (3, 1), (3, 2)], &TRIANGLE)
}

/// Directed 3-cycle 1 -> 2 -> 3 -> 1.
pub fn c3() -> DirectedFormation {
    build(3, &[(1, 2), (2, 3), (3, 1)], &TRIANGLE)
}

/// Acyclic path 3 -> 2 -> 1.
pub fn p3() -> DirectedFormation {
    build(3, &[(2, 1), (3, 2)], &TRIANGLE)
}

/// Two leaders (1 and 2) both observed by vertex 3.
pub fn two_leaders() -> DirectedFormation {
    build(3, &[(3, 1), (3, 2)], &TRIANGLE)
}

/// Four-agent cyclic formation whose bearing Laplacian has an eigenvalue
/// with negative real part while the formation is bearing equivalent.
pub fn ga() -> DirectedFormation {
    build(4, &GA_EDGES, &GA_POSITIONS)
}

/// Cyclic triangle 1 -> 4 -> 3 -> 1 with vertex 2 observing all three of
/// its members. Positions are generic.
pub fn gc() -> DirectedFormation {
    build(
        4,
        &[(2, 1), (1, 4), (2, 4), (2, 3), (4, 3), (3, 1)],
        &[[0.3, 0.4], [4.1, 6.2], [7.9, 1.3], [2.2, 8.7]],
    )
}

/// Infinitesimally bearing rigid but not bearing equivalent: the bearing
/// Laplacian has a four-dimensional kernel while the rigidity matrix has the
/// trivial three-dimensional one.
pub fn rigid_not_equivalent() -> DirectedFormation {
    build(
        4,
        &[(2, 3), (1, 4), (2, 4), (3, 1), (2, 1)],
        &[[3.0, 1.0], [2.0, 0.0], [2.0, 3.0], [3.0, 3.0]],
    )
}
