//! Deterministic random formations.
//!
//! Every generator draws from a ChaCha8 stream seeded by [`GenSpec::seed`],
//! so a spec always produces the same formation on every platform.
//! Positions are uniform in `[0, box_size]^d`; a draw is rejected and
//! repeated when two points come closer than `1e-3 * box_size`.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Configuration, DirectedFormation};
use crate::graph::{DirectedGraph, Edge};

/// Default side of the sampling box.
pub const DEFAULT_BOX: f64 = 10.0;

/// Minimum `|P_x ŷ|` between out-going bearings of a generated LFF vertex.
/// Much larger than the classifier's collinearity tolerance so generated
/// formations are comfortably generic.
pub const GENERIC_MARGIN: f64 = 1e-2;

const MAX_DRAWS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GenKind {
    /// Random positions for a caller-supplied graph.
    RandomPositionsOnGraph,
    /// Leader-first-follower graph grown one vertex at a time.
    Lff,
    /// Directed Hamiltonian cycle plus randomly oriented chords.
    DirectedCycleWithChords,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenSpec {
    pub kind: GenKind,
    pub n: usize,
    pub d: usize,
    pub seed: u64,
    pub box_size: f64,
    /// Required for [`GenKind::RandomPositionsOnGraph`], ignored otherwise.
    pub graph: Option<DirectedGraph>,
}

impl GenSpec {
    pub fn new(kind: GenKind, n: usize, d: usize, seed: u64) -> Self {
        GenSpec {
            kind,
            n,
            d,
            seed,
            box_size: DEFAULT_BOX,
            graph: None,
        }
    }

    pub fn on_graph(graph: DirectedGraph, d: usize, seed: u64) -> Self {
        GenSpec {
            kind: GenKind::RandomPositionsOnGraph,
            n: graph.vertex_count(),
            d,
            seed,
            box_size: DEFAULT_BOX,
            graph: Some(graph),
        }
    }
}

fn random_point(rng: &mut ChaCha8Rng, d: usize, side: f64) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(0.0..side)).collect()
}

fn far_from_all(p: &[f64], others: &[Vec<f64>], min_sep: f64) -> bool {
    others.iter().all(|q| {
        let dist2: f64 = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
        dist2.sqrt() >= min_sep
    })
}

fn random_points(rng: &mut ChaCha8Rng, n: usize, d: usize, side: f64) -> Result<Vec<Vec<f64>>> {
    let min_sep = 1e-3 * side;
    let mut points: Vec<Vec<f64>> = Vec::with_capacity(n);
    while points.len() < n {
        let mut placed = false;
        for _ in 0..MAX_DRAWS {
            let p = random_point(rng, d, side);
            if far_from_all(&p, &points, min_sep) {
                points.push(p);
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::InvalidSpec(
                "could not place separated points".into(),
            ));
        }
    }
    Ok(points)
}

fn unit(v: &[f64]) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter().map(|x| x / norm).collect()
}

/// `|P_a b|` for unit vectors `a`, `b`.
fn transverse(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    (1.0 - dot * dot).max(0.0).sqrt()
}

/// `n` separated points uniform in `[0, box_size]^d`, seeded like
/// [`generate`].
pub fn random_configuration(n: usize, d: usize, seed: u64, box_size: f64) -> Result<Configuration> {
    if !(box_size.is_finite() && box_size > 0.0) {
        return Err(Error::InvalidSpec(format!("bad box size {box_size}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Configuration::new(d, &random_points(&mut rng, n, d, box_size)?)
}

/// Generates a formation according to `spec`.
pub fn generate(spec: &GenSpec) -> Result<DirectedFormation> {
    if spec.n < 2 {
        return Err(Error::InvalidSpec(format!("need n >= 2, got {}", spec.n)));
    }
    if spec.d < 2 {
        return Err(Error::InvalidSpec(format!("need d >= 2, got {}", spec.d)));
    }
    if !(spec.box_size.is_finite() && spec.box_size > 0.0) {
        return Err(Error::InvalidSpec(format!(
            "bad box size {}",
            spec.box_size
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    match spec.kind {
        GenKind::RandomPositionsOnGraph => {
            let graph = spec
                .graph
                .clone()
                .ok_or_else(|| Error::InvalidSpec("random positions need a graph".into()))?;
            if graph.vertex_count() != spec.n {
                return Err(Error::InvalidSpec(format!(
                    "graph has {} vertices, spec says {}",
                    graph.vertex_count(),
                    spec.n
                )));
            }
            let points = random_points(&mut rng, spec.n, spec.d, spec.box_size)?;
            DirectedFormation::new(graph, Configuration::new(spec.d, &points)?)
        }
        GenKind::DirectedCycleWithChords => {
            let n = spec.n;
            let mut edges: Vec<Edge> = (0..n).map(|i| Edge::new(i, (i + 1) % n)).collect();
            for i in 0..n {
                for j in (i + 2)..n {
                    // (0, n-1) is a cycle edge in reverse
                    if i == 0 && j == n - 1 {
                        continue;
                    }
                    if rng.random_bool(0.3) {
                        let e = if rng.random_bool(0.5) {
                            Edge::new(i, j)
                        } else {
                            Edge::new(j, i)
                        };
                        edges.push(e);
                    }
                }
            }
            let graph = DirectedGraph::new(n, edges)?;
            let points = random_points(&mut rng, n, spec.d, spec.box_size)?;
            DirectedFormation::new(graph, Configuration::new(spec.d, &points)?)
        }
        GenKind::Lff => generate_lff(&mut rng, spec),
    }
}

fn generate_lff(rng: &mut ChaCha8Rng, spec: &GenSpec) -> Result<DirectedFormation> {
    let (n, d, side) = (spec.n, spec.d, spec.box_size);
    let min_sep = 1e-3 * side;
    // built in insertion order, relabelled at the end
    let mut points = random_points(rng, 2, d, side)?;
    let mut edges = vec![Edge::new(1, 0)];
    for v in 2..n {
        let max_deg = v.min(3);
        let deg = rng.random_range(2..=max_deg);
        let mut candidates: Vec<usize> = (0..v).collect();
        let mut placed = false;
        for _ in 0..MAX_DRAWS {
            candidates.shuffle(rng);
            let targets = &candidates[..deg];
            let p = random_point(rng, d, side);
            if !far_from_all(&p, &points, min_sep) {
                continue;
            }
            let bearings: Vec<Vec<f64>> = targets
                .iter()
                .map(|&t| {
                    unit(
                        &points[t]
                            .iter()
                            .zip(&p)
                            .map(|(a, b)| a - b)
                            .collect::<Vec<_>>(),
                    )
                })
                .collect();
            let generic = bearings[1..]
                .iter()
                .any(|b| transverse(&bearings[0], b) >= GENERIC_MARGIN);
            if generic {
                points.push(p);
                edges.extend(targets.iter().map(|&t| Edge::new(v, t)));
                placed = true;
                break;
            }
        }
        if !placed {
            return Err(Error::InvalidSpec(
                "could not place a non-collinear vertex".into(),
            ));
        }
    }
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut relabelled = vec![Vec::new(); n];
    for (old, p) in points.into_iter().enumerate() {
        relabelled[label[old]] = p;
    }
    let graph = DirectedGraph::new(
        n,
        edges
            .iter()
            .map(|e| Edge::new(label[e.source], label[e.target])),
    )?;
    DirectedFormation::new(graph, Configuration::new(d, &relabelled)?)
}
