//! Configurations, bearings and orthogonal projections.

use nalgebra::{DMatrix, DVector, DVectorView};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, Edge};

/// Minimum distance between the endpoints of an edge for its bearing to be
/// defined.
pub const SEP_MIN: f64 = 1e-12;

/// Default threshold on `|P_x y/|y||` below which two vectors count as
/// parallel.
pub const COLLINEAR_TOL: f64 = 1e-9;

/// `n` points in `R^d`, stored stacked as `p = (p_1, ..., p_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    dim: usize,
    stacked: DVector<f64>,
}

impl Configuration {
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        let mut stacked = Vec::with_capacity(dim * points.len());
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: p.len(),
                });
            }
            stacked.extend_from_slice(p);
        }
        Self::from_stacked(dim, DVector::from_vec(stacked))
    }

    pub fn from_stacked(dim: usize, stacked: DVector<f64>) -> Result<Self> {
        if dim < 2 {
            return Err(Error::DimensionTooSmall(dim));
        }
        if !stacked.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch {
                expected: dim * (stacked.len() / dim + 1),
                found: stacked.len(),
            });
        }
        if stacked.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFiniteCoordinate);
        }
        Ok(Configuration { dim, stacked })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.stacked.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.stacked.is_empty()
    }

    pub fn point(&self, i: usize) -> DVectorView<'_, f64> {
        self.stacked.rows(i * self.dim, self.dim)
    }

    pub fn points(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|i| self.point(i).iter().copied().collect())
            .collect()
    }

    pub fn stacked(&self) -> &DVector<f64> {
        &self.stacked
    }

    /// Basis of the trivial motions: the `d` translation columns of
    /// `1 ⊗ I_d` followed by the scaling column `p`.
    pub fn trivial_motion_basis(&self) -> Result<TrivialMotionBasis> {
        let n = self.len();
        let first = self.point(0);
        let all_equal = (1..n).all(|i| (self.point(i) - first).norm() <= SEP_MIN);
        if all_equal {
            return Err(Error::DegenerateConfiguration);
        }
        let d = self.dim;
        let mut t = DMatrix::zeros(d * n, d + 1);
        for i in 0..n {
            for a in 0..d {
                t[(i * d + a, a)] = 1.0;
            }
        }
        t.set_column(d, &self.stacked);
        Ok(TrivialMotionBasis { matrix: t })
    }
}

/// Translations and uniform scaling of a configuration, one motion per
/// column.
#[derive(Debug, Clone, PartialEq)]
pub struct TrivialMotionBasis {
    pub matrix: DMatrix<f64>,
}

impl TrivialMotionBasis {
    /// Orthonormal basis of the same column span.
    pub fn orthonormalized(&self) -> DMatrix<f64> {
        // columns are independent unless all points coincide, which the
        // constructor rejects
        let qr = self.matrix.clone().qr();
        qr.q()
    }
}

/// A directed graph together with a configuration that places every vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectedFormation {
    graph: DirectedGraph,
    config: Configuration,
}

impl DirectedFormation {
    pub fn new(graph: DirectedGraph, config: Configuration) -> Result<Self> {
        if graph.vertex_count() != config.len() {
            return Err(Error::VertexCountMismatch {
                vertices: graph.vertex_count(),
                points: config.len(),
            });
        }
        for (k, e) in graph.edges().iter().enumerate() {
            let distance = (config.point(e.target) - config.point(e.source)).norm();
            if distance <= SEP_MIN {
                return Err(Error::CoincidentPoints {
                    edge: Some(k),
                    distance,
                });
            }
        }
        Ok(DirectedFormation { graph, config })
    }

    pub fn graph(&self) -> &DirectedGraph {
        &self.graph
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    pub fn dim(&self) -> usize {
        self.config.dim()
    }

    pub fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Edge vector `e_k = p_j - p_i` of edge `k = (i, j)`.
    pub fn edge_vector(&self, k: usize) -> DVector<f64> {
        let Edge { source, target } = self.graph.edges()[k];
        self.config.point(target) - self.config.point(source)
    }

    pub fn edge_lengths(&self) -> Vec<f64> {
        (0..self.edge_count())
            .map(|k| self.edge_vector(k).norm())
            .collect()
    }

    /// Unit bearings `g_k`, one per edge, in edge order.
    pub fn bearings(&self) -> Vec<DVector<f64>> {
        // endpoints are separated by construction
        (0..self.edge_count())
            .map(|k| {
                let e = self.edge_vector(k);
                let len = e.norm();
                e / len
            })
            .collect()
    }

    /// The bearing function `F_B(p)`: all bearings stacked into `R^{dm}`.
    pub fn bearing_function(&self) -> DVector<f64> {
        stack(&self.bearings())
    }

    /// Whether the out-going bearings of `v` are pairwise parallel. A vertex
    /// with a single out-going edge is trivially collinear.
    pub fn outgoing_collinear(&self, v: usize, tol: f64) -> Result<bool> {
        if v >= self.vertex_count() {
            return Err(Error::NoSuchVertex(v));
        }
        let bearings: Vec<DVector<f64>> = self
            .graph
            .out_edge_ids(v)
            .map(|k| self.edge_vector(k))
            .collect();
        let Some(first) = bearings.first() else {
            return Err(Error::NoOutEdges(v));
        };
        for other in &bearings[1..] {
            if !are_parallel(first.as_slice(), other.as_slice(), tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Embeds the formation in `R^{new_dim}` by zero-padding every point.
    pub fn lift(&self, new_dim: usize) -> Result<DirectedFormation> {
        let d = self.dim();
        if new_dim <= d {
            return Err(Error::DimensionNotLarger {
                current: d,
                requested: new_dim,
            });
        }
        let points: Vec<Vec<f64>> = self
            .config
            .points()
            .into_iter()
            .map(|mut p| {
                p.resize(new_dim, 0.0);
                p
            })
            .collect();
        DirectedFormation::new(self.graph.clone(), Configuration::new(new_dim, &points)?)
    }

    /// Adds a vertex at `position` observing every vertex in `targets`.
    ///
    /// The new vertex gets index `n` and its edges are appended after the
    /// existing ones. At least two targets are required and the new bearings
    /// must not all be parallel.
    pub fn grow(&self, position: &[f64], targets: &[usize], tol: f64) -> Result<DirectedFormation> {
        let d = self.dim();
        let n = self.vertex_count();
        if position.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: position.len(),
            });
        }
        if targets.len() < 2 {
            return Err(Error::TooFewTargets(targets.len()));
        }
        let p_new = DVector::from_column_slice(position);
        let mut offsets = Vec::with_capacity(targets.len());
        for &t in targets {
            if t >= n {
                return Err(Error::NoSuchVertex(t));
            }
            let e = self.config.point(t) - &p_new;
            let distance = e.norm();
            if distance <= SEP_MIN {
                return Err(Error::CoincidentPoints {
                    edge: None,
                    distance,
                });
            }
            offsets.push(e);
        }
        let all_parallel = offsets[1..]
            .iter()
            .map(|e| are_parallel(offsets[0].as_slice(), e.as_slice(), tol))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .all(|p| p);
        if all_parallel {
            return Err(Error::CollinearOutEdges);
        }
        let mut edges = self.graph.edges().to_vec();
        edges.extend(targets.iter().map(|&t| Edge::new(n, t)));
        let graph = DirectedGraph::new(n + 1, edges)?;
        let mut stacked = self.config.stacked().as_slice().to_vec();
        stacked.extend_from_slice(position);
        let config = Configuration::from_stacked(d, DVector::from_vec(stacked))?;
        DirectedFormation::new(graph, config)
    }
}

/// The orthogonal projection `I - x x^T / |x|^2` onto the complement of `x`.
///
/// ```
/// let p = bearing_equiv::geometry::projection(&[2.0, 0.0]).unwrap();
/// assert_eq!(p.as_slice(), &[0.0, 0.0, 0.0, 1.0]);
/// ```
pub fn projection(x: &[f64]) -> Result<DMatrix<f64>> {
    let v = DVector::from_column_slice(x);
    let norm = v.norm();
    if norm <= SEP_MIN {
        return Err(Error::ZeroVector(norm));
    }
    let u = v / norm;
    Ok(DMatrix::identity(x.len(), x.len()) - &u * u.transpose())
}

/// Projection for a vector already known to have unit length.
pub(crate) fn unit_projection(g: &DVector<f64>) -> DMatrix<f64> {
    DMatrix::identity(g.len(), g.len()) - g * g.transpose()
}

/// Unit bearing from `from` toward `to`.
pub fn bearing(from: &[f64], to: &[f64]) -> Result<DVector<f64>> {
    if from.len() != to.len() {
        return Err(Error::DimensionMismatch {
            expected: from.len(),
            found: to.len(),
        });
    }
    let e = DVector::from_column_slice(to) - DVector::from_column_slice(from);
    let distance = e.norm();
    if distance <= SEP_MIN {
        return Err(Error::CoincidentPoints {
            edge: None,
            distance,
        });
    }
    Ok(e / distance)
}

/// True when `|P_x (y / |y|)| <= tol`.
pub fn are_parallel(x: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    let p = projection(x)?;
    let yv = DVector::from_column_slice(y);
    let ny = yv.norm();
    if ny <= SEP_MIN {
        return Err(Error::ZeroVector(ny));
    }
    Ok((p * (yv / ny)).norm() <= tol)
}

pub(crate) fn stack(blocks: &[DVector<f64>]) -> DVector<f64> {
    let mut data = Vec::with_capacity(blocks.iter().map(|b| b.len()).sum());
    for b in blocks {
        data.extend_from_slice(b.as_slice());
    }
    DVector::from_vec(data)
}
