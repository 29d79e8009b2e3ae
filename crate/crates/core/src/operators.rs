//! Bearing rigidity matrix, bearing Laplacian and their factorisations.
//!
//! With `H` the incidence matrix, `J` the observer selector and bars denoting
//! the Kronecker product with `I_d`:
//!
//! * `R_B = diag(P_k / |e_k|) H̄` is the Jacobian of the bearing function,
//! * `R̃_B = diag(P_k) H̄ = diag(|e_k|) R_B`,
//! * `L_B = J̄^T diag(P_k) H̄ = J̃_B^T R̃_B` with `J̃_B^T = J̄^T diag(P_k^T)`,
//! * for an undirected reading of the same edges, `H̄^T diag(P_k) H̄`.
//!
//! All matrices are dense.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::geometry::{unit_projection, DirectedFormation};
use crate::graph::DirectedGraph;

/// Allowed deviation of a desired bearing's norm from 1.
pub const UNIT_TOL: f64 = 1e-9;

/// Every matrix derived from one formation.
#[derive(Debug, Clone)]
pub struct OperatorBundle {
    pub incidence: DMatrix<f64>,
    pub selector: DMatrix<f64>,
    pub incidence_bar: DMatrix<f64>,
    pub selector_bar: DMatrix<f64>,
    pub rigidity: DMatrix<f64>,
    pub scaled_rigidity: DMatrix<f64>,
    pub scaled_selector_t: DMatrix<f64>,
    pub laplacian: DMatrix<f64>,
    pub edge_lengths: Vec<f64>,
}

impl OperatorBundle {
    pub fn new(f: &DirectedFormation) -> Self {
        let d = f.dim();
        let g = f.graph();
        let eye = DMatrix::<f64>::identity(d, d);
        let incidence = g.incidence_matrix();
        let selector = g.observer_selector_matrix();
        let incidence_bar = incidence.kronecker(&eye);
        let selector_bar = selector.kronecker(&eye);
        let projections = projection_diag(&f.bearings(), d);
        let scaled_rigidity = &projections * &incidence_bar;
        let scaled_selector_t = selector_bar.transpose() * projections.transpose();
        let laplacian = &scaled_selector_t * &scaled_rigidity;
        debug_assert!(
            (&laplacian - bearing_laplacian_blocks(f, None).expect("own bearings are unit")).amax()
                <= 1e-12,
            "factored and block bearing Laplacians disagree"
        );
        OperatorBundle {
            rigidity: bearing_rigidity_matrix(f),
            incidence,
            selector,
            incidence_bar,
            selector_bar,
            scaled_rigidity,
            scaled_selector_t,
            laplacian,
            edge_lengths: f.edge_lengths(),
        }
    }
}

fn projection_diag(bearings: &[DVector<f64>], d: usize) -> DMatrix<f64> {
    let m = bearings.len();
    let mut out = DMatrix::zeros(d * m, d * m);
    for (k, g) in bearings.iter().enumerate() {
        out.view_mut((k * d, k * d), (d, d))
            .copy_from(&unit_projection(g));
    }
    out
}

/// `R_B(p)`: block row `k` of edge `(i, j)` holds `-P_k/|e_k|` at block
/// column `i` and `P_k/|e_k|` at block column `j`.
pub fn bearing_rigidity_matrix(f: &DirectedFormation) -> DMatrix<f64> {
    let d = f.dim();
    let n = f.vertex_count();
    let mut r = DMatrix::zeros(d * f.edge_count(), d * n);
    for (k, e) in f.graph().edges().iter().enumerate() {
        let ev = f.edge_vector(k);
        let len = ev.norm();
        let block = unit_projection(&(ev / len)) / len;
        r.view_mut((k * d, e.target * d), (d, d)).copy_from(&block);
        r.view_mut((k * d, e.source * d), (d, d))
            .copy_from(&(-block));
    }
    r
}

/// Checks that `bearings` holds one unit vector of dimension `d` per edge.
pub fn validate_bearings(graph: &DirectedGraph, d: usize, bearings: &[DVector<f64>]) -> Result<()> {
    if bearings.len() != graph.edge_count() {
        return Err(Error::BearingCountMismatch {
            expected: graph.edge_count(),
            found: bearings.len(),
        });
    }
    for (k, g) in bearings.iter().enumerate() {
        if g.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: g.len(),
            });
        }
        let norm = g.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > UNIT_TOL {
            return Err(Error::NonUnitDesiredBearing { edge: k, norm });
        }
    }
    Ok(())
}

/// Bearing Laplacian assembled block by block from the given bearings:
/// `[L]_ii = Σ_{j∈N_i} P_ij`, `[L]_ij = -P_ij` for every edge `(i, j)`.
pub fn laplacian_from_bearings(
    graph: &DirectedGraph,
    d: usize,
    bearings: &[DVector<f64>],
) -> Result<DMatrix<f64>> {
    validate_bearings(graph, d, bearings)?;
    let n = graph.vertex_count();
    let mut l = DMatrix::zeros(d * n, d * n);
    for (e, g) in graph.edges().iter().zip(bearings) {
        let p = unit_projection(g);
        let (i, j) = (e.source * d, e.target * d);
        let mut diag = l.view_mut((i, i), (d, d));
        diag += &p;
        let mut off = l.view_mut((i, j), (d, d));
        off -= &p;
    }
    Ok(l)
}

/// Block-definition bearing Laplacian. Uses the formation's own bearings
/// unless `desired` supplies one unit bearing per edge.
pub fn bearing_laplacian_blocks(
    f: &DirectedFormation,
    desired: Option<&[DVector<f64>]>,
) -> Result<DMatrix<f64>> {
    match desired {
        Some(b) => laplacian_from_bearings(f.graph(), f.dim(), b),
        None => laplacian_from_bearings(f.graph(), f.dim(), &f.bearings()),
    }
}

/// `L_B = J̄^T diag(P_k) H̄`.
pub fn bearing_laplacian_factored(f: &DirectedFormation) -> DMatrix<f64> {
    let d = f.dim();
    let eye = DMatrix::<f64>::identity(d, d);
    let h_bar = f.graph().incidence_matrix().kronecker(&eye);
    let j_bar = f.graph().observer_selector_matrix().kronecker(&eye);
    j_bar.transpose() * projection_diag(&f.bearings(), d) * h_bar
}

/// The pair `(J̃_B^T, R̃_B)` whose product is `L_B`.
pub fn scaled_factors(f: &DirectedFormation) -> (DMatrix<f64>, DMatrix<f64>) {
    let d = f.dim();
    let eye = DMatrix::<f64>::identity(d, d);
    let h_bar = f.graph().incidence_matrix().kronecker(&eye);
    let j_bar = f.graph().observer_selector_matrix().kronecker(&eye);
    let p = projection_diag(&f.bearings(), d);
    (j_bar.transpose() * p.transpose(), p * h_bar)
}

/// Bearing Laplacian of the same edges read as undirected,
/// `H̄^T diag(P_k) H̄`. Assembled blockwise so the result is exactly
/// symmetric.
pub fn undirected_bearing_laplacian(f: &DirectedFormation) -> DMatrix<f64> {
    let d = f.dim();
    let n = f.vertex_count();
    let mut l = DMatrix::zeros(d * n, d * n);
    for (e, g) in f.graph().edges().iter().zip(f.bearings()) {
        let p = unit_projection(&g);
        let (i, j) = (e.source * d, e.target * d);
        for (r, c, sign) in [(i, i, 1.0), (j, j, 1.0), (i, j, -1.0), (j, i, -1.0)] {
            let mut block = l.view_mut((r, c), (d, d));
            block += &p * sign;
        }
    }
    l
}
