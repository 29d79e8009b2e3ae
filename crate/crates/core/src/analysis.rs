//! Classification of directed formations.
//!
//! A formation is *bearing equivalent* when
//! `Null(R_B) = Null(L_B) = span{1 ⊗ I_d, p}`. Since
//! `span{1 ⊗ I_d, p} ⊆ Null(R_B) ⊆ Null(L_B)` always holds, this is the same
//! as `dim Null(L_B) = d + 1`. The report computes the definition directly
//! and cross-checks it against the decomposition into infinitesimal bearing
//! rigidity plus `Null(J̃_B^T) ∩ Range(R̃_B) = {0}`.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DirectedFormation, COLLINEAR_TOL};
use crate::linalg::{self, EIGEN_CAP, RANK_TOL, SUBSPACE_TOL};
use crate::operators::OperatorBundle;

/// Every threshold used by the classifier. Echoed into reports.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value cut for ranks and null spaces.
    pub rank_rel: f64,
    /// Projector-distance threshold for subspace equality.
    pub subspace: f64,
    /// Threshold on `|P_x ŷ|` for parallel bearings.
    pub collinear: f64,
    /// Eigenvalues with modulus at most this count as zero.
    pub zero_eigenvalue: f64,
    /// Relative (to `max |λ|`) slack for "real" and "nonnegative".
    pub spectrum_rel: f64,
    /// Largest matrix handed to the eigensolver.
    pub eigen_cap: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel: RANK_TOL,
            subspace: SUBSPACE_TOL,
            collinear: COLLINEAR_TOL,
            zero_eigenvalue: 1e-6,
            spectrum_rel: 1e-8,
            eigen_cap: EIGEN_CAP,
        }
    }
}

/// Topological and geometric conditions evaluated alongside the
/// classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionFlags {
    pub acyclic: bool,
    pub spanning_root_exists: bool,
    /// Leader-first-follower graph with non-collinear out-going edges at
    /// every remaining vertex.
    pub lff: bool,
    /// Acyclic with at least two vertices of out-degree 0.
    pub prop_nonequiv_i: bool,
    /// Acyclic with at least two vertices of out-degree 1.
    pub prop_nonequiv_ii: bool,
    /// Acyclic with at least two vertices of out-degree >= 2 whose
    /// out-going bearings are all parallel.
    pub prop_nonequiv_iii: bool,
    /// Same as `prop_nonequiv_iii` but counting out-degree-1 vertices as
    /// collinear too.
    pub prop_nonequiv_iii_with_degree_one: bool,
    pub prop_two_edge_sufficient: bool,
    pub thm2_condition_ii_holds: bool,
}

/// Location of the spectrum of `L_B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpectrumClass {
    pub all_real_nonneg: bool,
    pub has_negative_real_part: bool,
    pub defective_zero: bool,
}

/// Full output of [`classify_equivalence`].
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub dim: usize,
    pub vertex_count: usize,
    pub edge_count: usize,
    pub rank_rb: usize,
    pub rank_lb: usize,
    pub dim_null_rb: usize,
    pub dim_null_lb: usize,
    /// Orthonormal columns spanning `Null(R_B)` (infinitesimal bearing
    /// motions).
    pub null_basis_rb: DMatrix<f64>,
    pub null_basis_lb: DMatrix<f64>,
    pub trivial_dim: usize,
    pub is_ibr: bool,
    pub kernel_equal: bool,
    pub is_bearing_equivalent: bool,
    /// `is_bearing_equivalent == (is_ibr && thm2_condition_ii_holds)`.
    pub decomposition_consistent: bool,
    pub spectrum: Vec<Complex64>,
    pub min_real_part: f64,
    pub zero_multiplicity_algebraic: usize,
    pub zero_multiplicity_geometric: usize,
    pub spectral: SpectrumClass,
    pub conditions: ConditionFlags,
    pub tolerances: Tolerances,
}

/// Rank of `R_B` equals `dn - d - 1`.
pub fn is_infinitesimally_bearing_rigid(f: &DirectedFormation, tol_rel: f64) -> Result<bool> {
    let r = crate::operators::bearing_rigidity_matrix(f);
    let dn = f.dim() * f.vertex_count();
    Ok(linalg::numerical_rank(&r, tol_rel)? + f.dim() + 1 == dn)
}

/// Counts eigenvalues near zero and places the rest of the spectrum.
pub fn spectrum_classification(
    spectrum: &[Complex64],
    dim_null_lb: usize,
    tol: &Tolerances,
) -> SpectrumClass {
    let scale = spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let slack = tol.spectrum_rel * scale;
    let all_real_nonneg = spectrum
        .iter()
        .all(|z| z.im.abs() <= slack && z.re >= -slack);
    let has_negative_real_part = spectrum.iter().any(|z| z.re < -slack);
    SpectrumClass {
        all_real_nonneg,
        has_negative_real_part,
        defective_zero: zero_multiplicity(spectrum, tol) != dim_null_lb,
    }
}

fn zero_multiplicity(spectrum: &[Complex64], tol: &Tolerances) -> usize {
    spectrum
        .iter()
        .filter(|z| z.norm() <= tol.zero_eigenvalue)
        .count()
}

/// Witnesses for the three non-equivalence conditions on acyclic graphs.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonEquivalenceConditions {
    pub cond_i: bool,
    pub cond_ii: bool,
    pub cond_iii: bool,
    pub cond_iii_with_degree_one: bool,
    /// Vertices with out-degree 0.
    pub leaders: Vec<usize>,
    /// Vertices with out-degree 1.
    pub single_edge: Vec<usize>,
    /// Vertices with out-degree >= 2 whose out-going bearings are parallel.
    pub collinear: Vec<usize>,
}

/// Evaluates the conditions that force `dim Null(L_B) > d + 1` on an
/// acyclic formation: two or more leaders (I), two or more vertices with a
/// single out-going edge (II), two or more vertices of out-degree >= 2 with
/// collinear out-going edges (III).
pub fn acyclic_nonequivalence_conditions(
    f: &DirectedFormation,
    collinear_tol: f64,
) -> Result<NonEquivalenceConditions> {
    if !f.graph().is_acyclic() {
        return Err(Error::NotAcyclic);
    }
    let deg = f.graph().out_degrees();
    let leaders: Vec<usize> = (0..deg.len()).filter(|&v| deg[v] == 0).collect();
    let single_edge: Vec<usize> = (0..deg.len()).filter(|&v| deg[v] == 1).collect();
    let mut collinear = Vec::new();
    for v in (0..deg.len()).filter(|&v| deg[v] >= 2) {
        if f.outgoing_collinear(v, collinear_tol)? {
            collinear.push(v);
        }
    }
    Ok(NonEquivalenceConditions {
        cond_i: leaders.len() >= 2,
        cond_ii: single_edge.len() >= 2,
        cond_iii: collinear.len() >= 2,
        cond_iii_with_degree_one: collinear.len() + single_edge.len() >= 2,
        leaders,
        single_edge,
        collinear,
    })
}

/// Every vertex has at most two out-going edges, and the two edges of an
/// out-degree-2 vertex are not collinear. Sufficient for
/// `Null(R_B) = Null(L_B)`.
pub fn two_edge_sufficient_condition(f: &DirectedFormation, collinear_tol: f64) -> bool {
    f.graph()
        .out_degrees()
        .into_iter()
        .enumerate()
        .all(|(v, deg)| match deg {
            0 | 1 => true,
            2 => !f
                .outgoing_collinear(v, collinear_tol)
                .expect("vertex has out-going edges"),
            _ => false,
        })
}

/// True when the graph has the leader-first-follower degree structure and
/// every vertex other than the leader and first follower has non-collinear
/// out-going edges.
pub fn is_lff(f: &DirectedFormation, collinear_tol: f64) -> bool {
    let s = f.graph().lff_structure();
    s.is_structural_lff
        && (0..f.vertex_count())
            .filter(|&v| Some(v) != s.leader && Some(v) != s.first_follower)
            .all(|v| {
                !f.outgoing_collinear(v, collinear_tol)
                    .expect("non-leader vertices have out-going edges")
            })
}

/// Eigenvalues of `L_B`, sorted by real part then imaginary part.
///
/// Ordering vertices by strongly connected component (sinks first) makes
/// `L_B` block lower triangular, so its spectrum is the union of the
/// spectra of the component blocks. A single-vertex block is the symmetric
/// matrix `sum_j P_{g_ij}` and gets a symmetric solver, which keeps acyclic
/// spectra exactly real. Larger blocks go to the general solver.
///
/// ```
/// use bearing_equiv::{analysis::laplacian_spectrum, fixtures, linalg::EIGEN_CAP};
///
/// let spectrum = laplacian_spectrum(&fixtures::ga(), EIGEN_CAP).unwrap();
/// assert!((spectrum[0].re + 0.0559).abs() < 1e-4);
/// ```
pub fn laplacian_spectrum(f: &DirectedFormation, cap: usize) -> Result<Vec<Complex64>> {
    let d = f.dim();
    let l = crate::operators::bearing_laplacian_factored(f);
    if l.nrows() > cap {
        return Err(Error::MatrixTooLarge(l.nrows(), cap));
    }
    let mut values = Vec::with_capacity(l.nrows());
    for comp in f.graph().strongly_connected_components() {
        let rows: Vec<usize> = comp.iter().flat_map(|&v| (v * d)..(v * d + d)).collect();
        let block = DMatrix::from_fn(rows.len(), rows.len(), |a, b| l[(rows[a], rows[b])]);
        if comp.len() == 1 {
            let sym = (&block + block.transpose()) * 0.5;
            values.extend(
                SymmetricEigen::new(sym)
                    .eigenvalues
                    .iter()
                    .map(|&x| Complex64::new(x, 0.0)),
            );
        } else {
            values.extend(linalg::eigenvalues_capped(&block, cap)?);
        }
    }
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}

/// Eigenvalues of the diagonal blocks of `L_B` for an acyclic formation.
/// Permuting vertices into topological order makes `L_B` block triangular,
/// so these are exactly the eigenvalues of `L_B`. Sorted ascending.
pub fn acyclic_block_spectrum(f: &DirectedFormation) -> Result<Vec<f64>> {
    if !f.graph().is_acyclic() {
        return Err(Error::NotAcyclic);
    }
    let d = f.dim();
    let l = crate::operators::bearing_laplacian_blocks(f, None)?;
    let mut values = Vec::with_capacity(l.nrows());
    for v in 0..f.vertex_count() {
        let block = l.view((v * d, v * d), (d, d)).into_owned();
        values.extend(SymmetricEigen::new(block).eigenvalues.iter().copied());
    }
    values.sort_by(f64::total_cmp);
    Ok(values)
}

/// Runs every rank, null-space and spectral test on `f`.
pub fn classify_equivalence(f: &DirectedFormation, tol: &Tolerances) -> Result<EquivalenceReport> {
    let d = f.dim();
    let n = f.vertex_count();
    let dn = d * n;
    let ops = OperatorBundle::new(f);

    let rank_rb = linalg::numerical_rank(&ops.rigidity, tol.rank_rel)?;
    let rank_lb = linalg::numerical_rank(&ops.laplacian, tol.rank_rel)?;
    let null_basis_rb = linalg::null_space_basis(&ops.rigidity, tol.rank_rel)?;
    let null_basis_lb = linalg::null_space_basis(&ops.laplacian, tol.rank_rel)?;
    let trivial = f.config().trivial_motion_basis()?;
    let trivial_orth = trivial.orthonormalized();
    let trivial_dim = linalg::numerical_rank(&trivial.matrix, tol.rank_rel)?;

    let is_ibr = rank_rb + d + 1 == dn;
    let kernel_equal = linalg::subspace_equal(&null_basis_rb, &null_basis_lb, tol.subspace)?;
    let lb_is_trivial = linalg::subspace_equal(&null_basis_lb, &trivial_orth, tol.subspace)?;
    let is_bearing_equivalent = is_ibr && kernel_equal && lb_is_trivial;

    let intersection = linalg::kernel_range_intersection_dim(
        &ops.scaled_selector_t,
        &ops.scaled_rigidity,
        tol.rank_rel,
    )?;
    let thm2_condition_ii_holds = intersection == 0;

    let spectrum = laplacian_spectrum(f, tol.eigen_cap)?;
    let min_real_part = spectrum.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
    let dim_null_lb = null_basis_lb.ncols();
    let spectral = spectrum_classification(&spectrum, dim_null_lb, tol);

    let acyclic = f.graph().is_acyclic();
    let nonequiv = if acyclic {
        Some(acyclic_nonequivalence_conditions(f, tol.collinear)?)
    } else {
        None
    };
    let conditions = ConditionFlags {
        acyclic,
        spanning_root_exists: f.graph().spanning_root().is_some(),
        lff: is_lff(f, tol.collinear),
        prop_nonequiv_i: nonequiv.as_ref().is_some_and(|c| c.cond_i),
        prop_nonequiv_ii: nonequiv.as_ref().is_some_and(|c| c.cond_ii),
        prop_nonequiv_iii: nonequiv.as_ref().is_some_and(|c| c.cond_iii),
        prop_nonequiv_iii_with_degree_one: nonequiv
            .as_ref()
            .is_some_and(|c| c.cond_iii_with_degree_one),
        prop_two_edge_sufficient: two_edge_sufficient_condition(f, tol.collinear),
        thm2_condition_ii_holds,
    };

    Ok(EquivalenceReport {
        dim: d,
        vertex_count: n,
        edge_count: f.edge_count(),
        rank_rb,
        rank_lb,
        dim_null_rb: null_basis_rb.ncols(),
        dim_null_lb,
        zero_multiplicity_algebraic: zero_multiplicity(&spectrum, tol),
        zero_multiplicity_geometric: dim_null_lb,
        null_basis_rb,
        null_basis_lb,
        trivial_dim,
        is_ibr,
        kernel_equal,
        is_bearing_equivalent,
        decomposition_consistent: is_bearing_equivalent == (is_ibr && thm2_condition_ii_holds),
        spectrum,
        min_real_part,
        spectral,
        conditions,
        tolerances: *tol,
    })
}
