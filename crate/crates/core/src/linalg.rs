//! Rank, null space, subspace comparison and eigenvalues for dense real
//! matrices.
//!
//! Rank decisions are relative: a singular value counts when it exceeds
//! `tol_rel * sigma_max`.

use nalgebra::{DMatrix, SymmetricEigen, SVD};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default relative singular-value threshold.
pub const RANK_TOL: f64 = 1e-10;
/// Default threshold on `|U U^T - V V^T|_2`.
pub const SUBSPACE_TOL: f64 = 1e-8;
/// Default largest matrix handed to the eigensolver.
pub const EIGEN_CAP: usize = 400;

const ORTHONORMAL_TOL: f64 = 1e-8;

fn check_finite(m: &DMatrix<f64>) -> Result<()> {
    if m.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFiniteEntries)
    }
}

/// Singular values in descending order.
pub fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    check_finite(m)?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let mut s: Vec<f64> = m.singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

fn threshold(sigma: &[f64], tol_rel: f64) -> f64 {
    tol_rel * sigma.first().copied().unwrap_or(0.0)
}

/// Number of singular values above `tol_rel * sigma_max`; zero for the zero
/// matrix.
pub fn numerical_rank(m: &DMatrix<f64>, tol_rel: f64) -> Result<usize> {
    let s = singular_values(m)?;
    let cut = threshold(&s, tol_rel);
    Ok(s.iter().filter(|&&x| x > cut && x > 0.0).count())
}

/// Orthonormal basis (as columns) of the right null space of `m`.
pub fn null_space_basis(m: &DMatrix<f64>, tol_rel: f64) -> Result<DMatrix<f64>> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    if cols == 0 {
        return Ok(DMatrix::zeros(0, 0));
    }
    // pad with zero rows so the SVD returns a full set of right vectors
    let padded = if rows < cols {
        let mut p = DMatrix::zeros(cols, cols);
        p.view_mut((0, 0), (rows, cols)).copy_from(m);
        p
    } else {
        m.clone()
    };
    let svd = SVD::new(padded, false, true);
    let v_t = svd.v_t.as_ref().expect("right singular vectors requested");
    let sigma_max = svd.singular_values.max();
    let cut = tol_rel * sigma_max;
    let null_rows: Vec<usize> = (0..cols)
        .filter(|&i| {
            let s = svd.singular_values[i];
            !(s > cut && s > 0.0)
        })
        .collect();
    let mut basis = DMatrix::zeros(cols, null_rows.len());
    for (c, &i) in null_rows.iter().enumerate() {
        basis.set_column(c, &v_t.row(i).transpose());
    }
    Ok(basis)
}

/// Orthonormal basis (as columns) of the column space of `m`.
pub fn range_basis(m: &DMatrix<f64>, tol_rel: f64) -> Result<DMatrix<f64>> {
    check_finite(m)?;
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return Ok(DMatrix::zeros(rows, 0));
    }
    let svd = SVD::new(m.clone(), true, false);
    let u = svd.u.as_ref().expect("left singular vectors requested");
    let cut = tol_rel * svd.singular_values.max();
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&i| {
            let s = svd.singular_values[i];
            s > cut && s > 0.0
        })
        .collect();
    let mut basis = DMatrix::zeros(rows, keep.len());
    for (c, &i) in keep.iter().enumerate() {
        basis.set_column(c, &u.column(i));
    }
    Ok(basis)
}

fn orthonormality_defect(u: &DMatrix<f64>) -> f64 {
    if u.ncols() == 0 {
        return 0.0;
    }
    (u.transpose() * u - DMatrix::identity(u.ncols(), u.ncols())).amax()
}

/// Spectral norm of the difference of the orthogonal projectors onto the two
/// column spans (the sine of the largest principal angle when the
/// dimensions agree).
pub fn projector_distance(u: &DMatrix<f64>, v: &DMatrix<f64>) -> Result<f64> {
    if u.nrows() != v.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "subspaces live in R^{} and R^{}",
            u.nrows(),
            v.nrows()
        )));
    }
    for b in [u, v] {
        check_finite(b)?;
        let defect = orthonormality_defect(b);
        if defect > ORTHONORMAL_TOL {
            return Err(Error::NotOrthonormal(defect));
        }
    }
    let diff = u * u.transpose() - v * v.transpose();
    if diff.is_empty() {
        return Ok(0.0);
    }
    let eig = SymmetricEigen::new(diff);
    Ok(eig.eigenvalues.amax())
}

/// True iff `u` and `v` span the same subspace: equal column counts and
/// `|U U^T - V V^T|_2 <= tol`.
pub fn subspace_equal(u: &DMatrix<f64>, v: &DMatrix<f64>, tol: f64) -> Result<bool> {
    let distance = projector_distance(u, v)?;
    Ok(u.ncols() == v.ncols() && distance <= tol)
}

/// `dim(Null(a) ∩ Range(b))`, from orthonormal bases `N`, `R` as
/// `dim N + dim R - rank([N | R])`.
pub fn kernel_range_intersection_dim(
    a: &DMatrix<f64>,
    b: &DMatrix<f64>,
    tol_rel: f64,
) -> Result<usize> {
    if a.ncols() != b.nrows() {
        return Err(Error::ShapeMismatch(format!(
            "A has {} columns but B has {} rows",
            a.ncols(),
            b.nrows()
        )));
    }
    let n = null_space_basis(a, tol_rel)?;
    let r = range_basis(b, tol_rel)?;
    if n.ncols() == 0 || r.ncols() == 0 {
        return Ok(0);
    }
    let mut joined = DMatrix::zeros(a.ncols(), n.ncols() + r.ncols());
    joined.columns_mut(0, n.ncols()).copy_from(&n);
    joined.columns_mut(n.ncols(), r.ncols()).copy_from(&r);
    let rank = numerical_rank(&joined, tol_rel)?;
    Ok(n.ncols() + r.ncols() - rank)
}

/// Diagonal similarity scaling by powers of two that makes row and column
/// norms comparable. Eigenvalues are unchanged exactly.
fn balance(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    let radix = 2.0_f64;
    let mut converged = false;
    while !converged {
        converged = true;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += m[(j, i)].abs();
                    r += m[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0;
            let mut g = r / radix;
            while c < g {
                f *= radix;
                c *= radix * radix;
            }
            g = r * radix;
            while c > g {
                f /= radix;
                c /= radix * radix;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                for j in 0..n {
                    m[(i, j)] /= f;
                    m[(j, i)] *= f;
                }
            }
        }
    }
}

/// All eigenvalues of a square matrix, sorted by real part then imaginary
/// part. Refuses matrices larger than [`EIGEN_CAP`].
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>> {
    eigenvalues_capped(m, EIGEN_CAP)
}

pub fn eigenvalues_capped(m: &DMatrix<f64>, cap: usize) -> Result<Vec<Complex64>> {
    if !m.is_square() {
        return Err(Error::ShapeMismatch(format!(
            "eigenvalues need a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() > cap {
        return Err(Error::MatrixTooLarge(m.nrows(), cap));
    }
    check_finite(m)?;
    if m.is_empty() {
        return Ok(Vec::new());
    }
    let mut work = m.clone();
    balance(&mut work);
    let dense = faer::Mat::from_fn(work.nrows(), work.ncols(), |i, j| work[(i, j)]);
    let mut values: Vec<Complex64> = dense.eigenvalues().map_err(|_| Error::ConvergenceFailure)?;
    if values
        .iter()
        .any(|z| !z.re.is_finite() || !z.im.is_finite())
    {
        return Err(Error::ConvergenceFailure);
    }
    values.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(values)
}
