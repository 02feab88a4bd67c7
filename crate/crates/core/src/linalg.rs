//! Small dense-linear-algebra helpers shared by the sketch, the solver and
//! the verification suite.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Singular values below this fraction of the largest one are treated as
/// zero when counting rank or picking the shrink threshold.
pub const SV_RELATIVE_ZERO: f64 = 1e-12;

/// Relative floor on the smallest eigenvalue of the ridged within-class
/// scatter; below it the whitening solve refuses to proceed.
pub const SPD_RELATIVE_FLOOR: f64 = 1e-12;

/// Iteration cap for the implicit-shift SVD. Well-conditioned buffers
/// converge in a few sweeps; the cap only exists to turn pathological
/// non-convergence into an error instead of a hang.
const SVD_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone)]
pub struct ThinSvd {
    pub u: DMatrix<f64>,
    pub singular_values: DVector<f64>,
    pub vt: DMatrix<f64>,
}

/// Thin SVD with singular values in descending order and a deterministic
/// sign convention: every right singular vector is flipped so that its
/// largest-magnitude entry is positive (first such entry on ties).
pub fn thin_svd(m: &DMatrix<f64>) -> Result<ThinSvd> {
    if let Some(bad) = (0..m.nrows()).find(|&i| m.row(i).iter().any(|v| !v.is_finite())) {
        return Err(Error::Numerical(format!(
            "non-finite entry in row {bad} of SVD input"
        )));
    }
    let svd = m
        .clone()
        .try_svd(true, true, f64::EPSILON, SVD_MAX_ITER)
        .ok_or_else(|| Error::Numerical("singular value decomposition did not converge".into()))?;
    let mut u = svd.u.expect("u was requested");
    let s = svd.singular_values;
    let mut vt = svd.v_t.expect("v_t was requested");
    for i in 0..vt.nrows() {
        let row = vt.row(i);
        let mut arg = 0;
        for j in 1..row.len() {
            if row[j].abs() > row[arg].abs() {
                arg = j;
            }
        }
        if row[arg] < 0.0 {
            vt.row_mut(i).neg_mut();
            u.column_mut(i).neg_mut();
        }
    }
    Ok(ThinSvd {
        u,
        singular_values: s,
        vt,
    })
}

/// Symmetric eigendecomposition with eigenvalues sorted descending.
/// The sort is stable, so equal eigenvalues keep the solver's original
/// column order.
pub fn sym_eigen_desc(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let eig = m.clone().symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());
    let vals = DVector::from_fn(n, |i, _| eig.eigenvalues[order[i]]);
    let vecs = eig.eigenvectors.select_columns(order.iter());
    (vals, vecs)
}

pub fn spectral_norm_sym(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(0.0, |acc, v| acc.max(v.abs()))
}

pub fn min_eig_sym(m: &DMatrix<f64>) -> f64 {
    m.clone()
        .symmetric_eigenvalues()
        .iter()
        .fold(f64::INFINITY, |acc, v| acc.min(*v))
}

/// (m + mᵀ)/2, entrywise, so the result is symmetric to the bit.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    debug_assert_eq!(m.nrows(), m.ncols());
    let mut out = m.clone();
    for i in 0..m.nrows() {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// mᵀm, symmetrized.
pub fn gram(m: &DMatrix<f64>) -> DMatrix<f64> {
    symmetrize(&m.tr_mul(m))
}

/// Inverse square root of a symmetric positive-definite matrix, used to
/// whiten the generalized eigenproblem. Rejects matrices whose smallest
/// eigenvalue falls below `SPD_RELATIVE_FLOOR` times the largest magnitude.
pub fn spd_inv_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let (vals, vecs) = sym_eigen_desc(m);
    let n = vals.len();
    let top = vals[0].abs().max(vals[n - 1].abs());
    if top == 0.0 || vals[n - 1] < SPD_RELATIVE_FLOOR * top {
        return Err(Error::Numerical(
            "within-class scatter is numerically singular; increase the ridge".into(),
        ));
    }
    let inv_sqrt = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| 1.0 / vals[i].sqrt()));
    Ok(&vecs * inv_sqrt * vecs.transpose())
}
