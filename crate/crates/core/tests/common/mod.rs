//! Random formation builders and independent numerical oracles shared by
//! the integration tests.
#![allow(dead_code)]

use bearing_equiv::generate::{generate, random_configuration, GenKind, GenSpec, DEFAULT_BOX};
use bearing_equiv::geometry::{Configuration, DirectedFormation};
use bearing_equiv::graph::{DirectedGraph, Edge};
use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn place(rng: &mut ChaCha8Rng, graph: DirectedGraph, d: usize) -> DirectedFormation {
    let config = random_configuration(graph.vertex_count(), d, rng.random(), DEFAULT_BOX).unwrap();
    DirectedFormation::new(graph, config).unwrap()
}

/// Random DAG on a random vertex order. Each vertex links to each earlier
/// vertex with probability 1/2; at least one edge overall.
pub fn random_acyclic(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DirectedFormation {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut edges = Vec::new();
    for j in 1..n {
        for i in 0..j {
            if rng.random_bool(0.5) {
                edges.push(Edge::new(order[j], order[i]));
            }
        }
    }
    if edges.is_empty() {
        edges.push(Edge::new(order[1], order[0]));
    }
    place(rng, DirectedGraph::new(n, edges).unwrap(), d)
}

/// Random simple digraph: every ordered pair is an edge with probability `p`.
pub fn random_digraph(rng: &mut ChaCha8Rng, n: usize, d: usize, p: f64) -> DirectedFormation {
    let mut edges = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j && rng.random_bool(p) {
                edges.push(Edge::new(i, j));
            }
        }
    }
    if edges.is_empty() {
        edges.push(Edge::new(1, 0));
    }
    place(rng, DirectedGraph::new(n, edges).unwrap(), d)
}

/// Mix of acyclic, cyclic-with-chords, LFF and arbitrary random formations.
pub fn mixed_formation(seed: u64) -> DirectedFormation {
    let d = rng(seed ^ 0x5eed).random_range(2..=3);
    mixed_formation_in(seed, d)
}

pub fn mixed_formation_in(seed: u64, d: usize) -> DirectedFormation {
    let mut r = rng(seed);
    let n = r.random_range(3..=8);
    match seed % 4 {
        0 => random_acyclic(&mut r, n, d),
        1 => generate(&GenSpec::new(GenKind::DirectedCycleWithChords, n, d, seed)).unwrap(),
        2 => generate(&GenSpec::new(GenKind::Lff, n, d, seed)).unwrap(),
        _ => random_digraph(&mut r, n, d, 0.4),
    }
}

fn sink_order_dag(rng: &mut ChaCha8Rng, degrees: &[usize]) -> Vec<Edge> {
    // vertex k links to `degrees[k]` distinct vertices among 0..k
    let mut edges = Vec::new();
    for (k, &deg) in degrees.iter().enumerate() {
        let mut earlier: Vec<usize> = (0..k).collect();
        earlier.shuffle(rng);
        edges.extend(earlier[..deg].iter().map(|&t| Edge::new(k, t)));
    }
    edges
}

/// Acyclic formation with at least two vertices of out-degree 0.
pub fn with_two_leaders(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DirectedFormation {
    let mut degrees = vec![0, 0];
    for k in 2..n {
        degrees.push(rng.random_range(1..=k.min(3)));
    }
    let graph = DirectedGraph::new(n, sink_order_dag(rng, &degrees)).unwrap();
    place(rng, graph, d)
}

/// Acyclic formation with one leader and at least two vertices of
/// out-degree 1.
pub fn with_two_single_edge(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DirectedFormation {
    let mut degrees = vec![0, 1, 1];
    for k in 3..n {
        degrees.push(rng.random_range(1..=k.min(3)));
    }
    let graph = DirectedGraph::new(n, sink_order_dag(rng, &degrees)).unwrap();
    place(rng, graph, d)
}

/// Acyclic formation, one leader, every follower with out-degree >= 2
/// except vertex 1, and vertices 2 and 3 each placed on the line through
/// their two targets.
pub fn with_two_collinear(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DirectedFormation {
    assert!(n >= 4);
    let mut degrees = vec![0, 1, 2, 2];
    for k in 4..n {
        degrees.push(rng.random_range(2..=k.min(3)));
    }
    let edges = sink_order_dag(rng, &degrees);
    let mut points = random_configuration(n, d, rng.random(), DEFAULT_BOX)
        .unwrap()
        .points();
    for v in [2, 3] {
        let targets: Vec<usize> = edges
            .iter()
            .filter(|e| e.source == v)
            .map(|e| e.target)
            .collect();
        let (a, b) = (&points[targets[0]], &points[targets[1]]);
        let t = if rng.random_bool(0.5) {
            rng.random_range(1.2..2.0)
        } else {
            rng.random_range(-1.0..-0.2)
        };
        points[v] = a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect();
    }
    let config = Configuration::new(d, &points).unwrap();
    DirectedFormation::new(DirectedGraph::new(n, edges).unwrap(), config).unwrap()
}

/// Random graph in which vertices 0 and 1 have no out-going edges.
pub fn two_leader_graph(rng: &mut ChaCha8Rng, n: usize, d: usize) -> DirectedFormation {
    let mut edges = Vec::new();
    for i in 2..n {
        let mut any = false;
        for j in 0..n {
            if i != j && rng.random_bool(0.5) {
                edges.push(Edge::new(i, j));
                any = true;
            }
        }
        if !any {
            edges.push(Edge::new(i, rng.random_range(0..2)));
        }
    }
    place(rng, DirectedGraph::new(n, edges).unwrap(), d)
}

/// `exp(m)` by scaling and squaring with a degree-30 Taylor polynomial.
pub fn expm(m: &DMatrix<f64>) -> DMatrix<f64> {
    let norm = m.abs().row_sum().max();
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let a = m / 2f64.powi(s);
    let n = m.nrows();
    let mut sum = DMatrix::identity(n, n);
    let mut term = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &a / k as f64;
        sum += &term;
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// Stacked bearings `g_k = (p_j - p_i)/|p_j - p_i|` computed directly from
/// coordinates, with no library help.
pub fn bearings_of(f: &DirectedFormation, p: &DVector<f64>) -> DVector<f64> {
    let d = f.dim();
    let mut out = DVector::zeros(d * f.edge_count());
    for (k, e) in f.graph().edges().iter().enumerate() {
        let diff: Vec<f64> = (0..d)
            .map(|a| p[e.target * d + a] - p[e.source * d + a])
            .collect();
        let len = diff.iter().map(|x| x * x).sum::<f64>().sqrt();
        for a in 0..d {
            out[k * d + a] = diff[a] / len;
        }
    }
    out
}

/// Central-difference Jacobian of the bearing function.
pub fn fd_jacobian(f: &DirectedFormation, h: f64) -> DMatrix<f64> {
    let p = f.config().stacked().clone();
    let mut jac = DMatrix::zeros(f.dim() * f.edge_count(), p.len());
    for c in 0..p.len() {
        let mut plus = p.clone();
        let mut minus = p.clone();
        plus[c] += h;
        minus[c] -= h;
        let col = (bearings_of(f, &plus) - bearings_of(f, &minus)) / (2.0 * h);
        jac.set_column(c, &col);
    }
    jac
}

/// Kronecker product of a graph matrix with `I_d`.
pub fn kron_identity(m: &DMatrix<f64>, d: usize) -> DMatrix<f64> {
    m.kronecker(&DMatrix::<f64>::identity(d, d))
}
