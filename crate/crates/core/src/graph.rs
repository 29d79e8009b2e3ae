//! Directed sensing graphs.
//!
//! An edge `(i, j)` means agent `i` observes agent `j`: `i` is the observer
//! (source) and `j` the observed agent (target). Vertices are indexed from 0
//! in the library API; the JSON documents and the CLI use 1-based ids.

use std::collections::HashMap;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A directed edge from observer `source` to observed `target`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
}

impl Edge {
    pub fn new(source: usize, target: usize) -> Self {
        Edge { source, target }
    }
}

impl From<(usize, usize)> for Edge {
    fn from((source, target): (usize, usize)) -> Self {
        Edge { source, target }
    }
}

/// A simple directed graph without self-loops or repeated edges.
///
/// Edge order is significant: the `k`-th edge indexes row `k` of every
/// edge-indexed matrix (incidence, rigidity, ...).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    edges: Vec<Edge>,
}

/// Result of checking the structural part of the leader-first-follower
/// conditions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LffStructure {
    pub is_structural_lff: bool,
    pub leader: Option<usize>,
    pub first_follower: Option<usize>,
}

impl DirectedGraph {
    /// Validates a vertex count and an edge list (0-based ids).
    pub fn new<E: Into<Edge>>(n: usize, edges: impl IntoIterator<Item = E>) -> Result<Self> {
        if n < 2 {
            return Err(Error::TooFewVertices(n));
        }
        let edges: Vec<Edge> = edges.into_iter().map(Into::into).collect();
        let mut seen: HashMap<Edge, usize> = HashMap::with_capacity(edges.len());
        for (k, e) in edges.iter().enumerate() {
            for v in [e.source, e.target] {
                if v >= n {
                    return Err(Error::VertexIdOutOfRange {
                        edge: k,
                        vertex: v,
                        n,
                    });
                }
            }
            if e.source == e.target {
                return Err(Error::SelfLoop {
                    edge: k,
                    vertex: e.source,
                });
            }
            if let Some(&first) = seen.get(e) {
                return Err(Error::DuplicateEdge {
                    edge: k,
                    first,
                    from: e.source,
                    to: e.target,
                });
            }
            seen.insert(*e, k);
        }
        Ok(DirectedGraph { n, edges })
    }

    /// Same as [`DirectedGraph::new`] but with 1-based vertex ids, as used in
    /// documents and on the command line.
    pub fn from_one_based(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut shifted = Vec::with_capacity(edges.len());
        for (k, &(s, t)) in edges.iter().enumerate() {
            for v in [s, t] {
                if v == 0 || v > n {
                    return Err(Error::VertexIdOutOfRange {
                        edge: k,
                        vertex: v,
                        n,
                    });
                }
            }
            shifted.push((s - 1, t - 1));
        }
        Self::new(n, shifted)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Targets of the out-going edges of `v`, in edge order.
    pub fn out_neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .filter(move |e| e.source == v)
            .map(|e| e.target)
    }

    /// Indices of the out-going edges of `v`.
    pub fn out_edge_ids(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.source == v)
            .map(|(k, _)| k)
    }

    pub fn out_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.source] += 1;
        }
        deg
    }

    /// The `m x n` incidence matrix: row `k` of edge `(i, j)` has `-1` at the
    /// observer `i` and `+1` at the target `j`, so `(H p)_k = p_j - p_i`.
    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.edges.len(), self.n);
        for (k, e) in self.edges.iter().enumerate() {
            h[(k, e.source)] = -1.0;
            h[(k, e.target)] = 1.0;
        }
        h
    }

    /// The `m x n` observer selector: the incidence matrix with its `+1`
    /// entries zeroed. `J^T H` is the directed (out-degree) Laplacian.
    pub fn observer_selector_matrix(&self) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.edges.len(), self.n);
        for (k, e) in self.edges.iter().enumerate() {
            j[(k, e.source)] = -1.0;
        }
        j
    }

    /// The out-degree Laplacian `L = J^T H`: `L_ii = |N_i|`, `L_ij = -1` for
    /// every edge `(i, j)`.
    pub fn laplacian(&self) -> DMatrix<f64> {
        let mut l = DMatrix::zeros(self.n, self.n);
        for e in &self.edges {
            l[(e.source, e.source)] += 1.0;
            l[(e.source, e.target)] -= 1.0;
        }
        l
    }

    /// A topological order in which every edge points from a later vertex to
    /// an earlier one (sinks first), or `None` when a directed cycle exists.
    pub fn sink_first_order(&self) -> Option<Vec<usize>> {
        let mut remaining_out = self.out_degrees();
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for e in &self.edges {
            incoming[e.target].push(e.source);
        }
        let mut ready: Vec<usize> = (0..self.n).filter(|&v| remaining_out[v] == 0).collect();
        ready.reverse();
        let mut order = Vec::with_capacity(self.n);
        while let Some(v) = ready.pop() {
            order.push(v);
            for &u in &incoming[v] {
                remaining_out[u] -= 1;
                if remaining_out[u] == 0 {
                    ready.push(u);
                }
            }
        }
        (order.len() == self.n).then_some(order)
    }

    pub fn is_acyclic(&self) -> bool {
        self.sink_first_order().is_some()
    }

    /// The smallest vertex `r` such that every vertex has a directed path to
    /// `r`, i.e. the root of a spanning tree of observation edges.
    pub fn spanning_root(&self) -> Option<usize> {
        let mut incoming: Vec<Vec<usize>> = vec![Vec::new(); self.n];
        for e in &self.edges {
            incoming[e.target].push(e.source);
        }
        (0..self.n).find(|&root| {
            let mut seen = vec![false; self.n];
            seen[root] = true;
            let mut stack = vec![root];
            let mut count = 1;
            while let Some(v) = stack.pop() {
                for &u in &incoming[v] {
                    if !seen[u] {
                        seen[u] = true;
                        count += 1;
                        stack.push(u);
                    }
                }
            }
            count == self.n
        })
    }

    /// Strongly connected components, each sorted, listed sinks first: no
    /// edge leaves a component towards a later one.
    pub fn strongly_connected_components(&self) -> Vec<Vec<usize>> {
        let g = petgraph::graph::DiGraph::<(), ()>::from_edges(
            self.edges
                .iter()
                .map(|e| (e.source as u32, e.target as u32)),
        );
        let mut g = g;
        while g.node_count() < self.n {
            g.add_node(());
        }
        // tarjan_scc yields reverse topological order, i.e. sinks first
        petgraph::algo::tarjan_scc(&g)
            .into_iter()
            .map(|c| {
                let mut c: Vec<usize> = c.into_iter().map(|v| v.index()).collect();
                c.sort_unstable();
                c
            })
            .collect()
    }

    /// Checks the degree conditions of a leader-first-follower graph: one
    /// vertex of out-degree 0 (leader), one of out-degree 1 pointing at the
    /// leader (first follower), and out-degree at least 2 everywhere else.
    /// Non-collinearity of the out-going edges is a geometric question and
    /// is checked on the formation.
    pub fn lff_structure(&self) -> LffStructure {
        let deg = self.out_degrees();
        let leaders: Vec<usize> = (0..self.n).filter(|&v| deg[v] == 0).collect();
        let leader = (leaders.len() == 1).then(|| leaders[0]);
        let first_follower = leader.and_then(|l| {
            let ones: Vec<usize> = (0..self.n).filter(|&v| deg[v] == 1).collect();
            match ones.as_slice() {
                [f] if self.out_neighbors(*f).next() == Some(l) => Some(*f),
                _ => None,
            }
        });
        let is_structural_lff = first_follower.is_some()
            && (0..self.n)
                .filter(|&v| Some(v) != leader && Some(v) != first_follower)
                .all(|v| deg[v] >= 2);
        LffStructure {
            is_structural_lff,
            leader,
            first_follower,
        }
    }
}
