//! Small dense linear-algebra helpers shared by the estimation and scm
//! layers: rank-revealing least squares and residualization.

use nalgebra::{DMatrix, DVector};

/// Relative singular-value cutoff for rank decisions.
pub(crate) const RANK_TOL: f64 = 1e-10;

/// Minimum-norm least-squares solution of `a * x = b` for each column of
/// `b`, via SVD with a relative rank tolerance. Returns the coefficient
/// matrix and the numerical rank of `a`. Tall systems are reduced by a QR
/// factorization first.
pub(crate) fn lstsq(a: &DMatrix<f64>, b: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let (nrows, ncols) = a.shape();
    assert_eq!(nrows, b.nrows(), "lstsq: row mismatch");
    if ncols == 0 {
        return (DMatrix::zeros(0, b.ncols()), 0);
    }
    if nrows > 2 * ncols {
        let qr = a.clone().qr();
        let r = qr.r();
        let qtb = qr.q().transpose() * b;
        return lstsq_svd(&r, &qtb);
    }
    lstsq_svd(a, b)
}

fn lstsq_svd(a: &DMatrix<f64>, b: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let tol = smax * RANK_TOL;
    let rank = svd.singular_values.iter().filter(|&&s| s > tol).count();
    let u = svd.u.as_ref().expect("svd u");
    let vt = svd.v_t.as_ref().expect("svd v_t");
    // x = V * diag(1/s where s > tol else 0) * U^T * b
    let mut utb = u.transpose() * b;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        let scale = if s > tol { 1.0 / s } else { 0.0 };
        utb.row_mut(i).scale_mut(scale);
    }
    (vt.transpose() * utb, rank)
}

/// Residuals of regressing every column of `m` on the columns of `c`, and
/// the numerical rank of `c`. With zero conditioning columns the residuals
/// are `m` itself.
pub(crate) fn residualize(c: &DMatrix<f64>, m: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    if c.ncols() == 0 {
        return (m.clone(), 0);
    }
    let (coef, rank) = lstsq(c, m);
    (m - c * coef, rank)
}

/// Convenience for a single right-hand side.
pub(crate) fn lstsq_vec(a: &DMatrix<f64>, b: &DVector<f64>) -> (DVector<f64>, usize) {
    let bm = DMatrix::from_column_slice(b.len(), 1, b.as_slice());
    let (x, rank) = lstsq(a, &bm);
    (DVector::from_column_slice(x.as_slice()), rank)
}

/// Smallest and largest singular values of a matrix.
pub(crate) fn singular_extrema(a: &DMatrix<f64>) -> (f64, f64) {
    if a.nrows() == 0 || a.ncols() == 0 {
        return (0.0, 0.0);
    }
    let svd = a.clone().svd(false, false);
    let min = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    (min, max)
}
