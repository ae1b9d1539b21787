//! Thin wrappers over `nalgebra` for the few dense operations the features need.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

pub struct LeastSquares {
    pub coef: DVector<f64>,
    pub fitted: DVector<f64>,
    pub rank: usize,
}

/// Minimum-norm least squares through the SVD pseudoinverse.
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> LeastSquares {
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = (x.nrows().max(x.ncols()) as f64) * f64::EPSILON * smax;
    let u = svd.u.as_ref().expect("u requested");
    let v_t = svd.v_t.as_ref().expect("v_t requested");
    let uty = u.transpose() * y;
    let mut scaled = DVector::zeros(svd.singular_values.len());
    let mut rank = 0;
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > tol {
            scaled[i] = uty[i] / s;
            rank += 1;
        }
    }
    let coef = v_t.transpose() * scaled;
    let fitted = x * &coef;
    LeastSquares { coef, fitted, rank }
}

/// Cholesky factor of a symmetric matrix; adds `1e-8 I` (growing tenfold on
/// each retry) when the matrix is not numerically positive definite. The flag
/// reports whether any ridge was needed.
pub fn cholesky_regularized(m: &DMatrix<f64>) -> (Cholesky<f64, Dyn>, bool) {
    if let Some(c) = Cholesky::new(m.clone()) {
        return (c, false);
    }
    let n = m.nrows();
    let mut ridge = 1e-8;
    loop {
        let shifted = m + DMatrix::identity(n, n) * ridge;
        if let Some(c) = Cholesky::new(shifted) {
            return (c, true);
        }
        ridge *= 10.0;
    }
}

/// `log det` from a Cholesky factor.
pub fn log_det(c: &Cholesky<f64, Dyn>) -> f64 {
    let l = c.l_dirty();
    (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>() * 2.0
}

/// `(x - mu)^T S^-1 (x - mu)` given the Cholesky factor of `S`.
pub fn mahalanobis_sq(c: &Cholesky<f64, Dyn>, x: &[f64], mu: &[f64]) -> f64 {
    let diff = DVector::from_iterator(x.len(), x.iter().zip(mu).map(|(a, b)| a - b));
    let l = c.l_dirty();
    let v = l
        .solve_lower_triangular(&diff)
        .expect("cholesky factor has a positive diagonal");
    v.norm_squared()
}

/// Eigenvalues of a symmetric matrix, descending, negatives clamped to zero.
pub fn symmetric_eigenvalues_desc(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = m
        .clone()
        .symmetric_eigenvalues()
        .iter()
        .map(|v| v.max(0.0))
        .collect();
    ev.sort_by(|a, b| b.total_cmp(a));
    ev
}

/// Sample covariance of the rows of `data` (`n x p`).
pub fn covariance(data: &DMatrix<f64>) -> DMatrix<f64> {
    let n = data.nrows();
    let means = data.row_mean();
    let mut centered = data.clone();
    for mut row in centered.row_iter_mut() {
        row -= &means;
    }
    (centered.transpose() * centered) / (n as f64 - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_fit_recovers_coefficients() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 0.0, 1.0, 1.0, 1.0, 2.0, 1.0, 3.0]);
        let y = DVector::from_vec(vec![1.0, 3.0, 5.0, 7.0]);
        let fit = least_squares(&x, &y);
        assert_eq!(fit.rank, 2);
        assert!((fit.coef[0] - 1.0).abs() < 1e-12);
        assert!((fit.coef[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rank_deficient_design_uses_pseudoinverse() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 2.0, 2.0, 4.0, 3.0, 6.0]);
        let y = DVector::from_vec(vec![5.0, 10.0, 15.0]);
        let fit = least_squares(&x, &y);
        assert_eq!(fit.rank, 1);
        // minimum-norm solution of b0 + 2 b1 = 5
        assert!((fit.coef[0] - 1.0).abs() < 1e-12);
        assert!((fit.coef[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn singular_matrix_gets_ridge() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let (c, reg) = cholesky_regularized(&m);
        assert!(reg);
        assert!(log_det(&c).is_finite());
        let (_, reg) = cholesky_regularized(&DMatrix::identity(3, 3));
        assert!(!reg);
    }

    #[test]
    fn mahalanobis_matches_identity_case() {
        let (c, _) = cholesky_regularized(&DMatrix::identity(2, 2));
        assert!((mahalanobis_sq(&c, &[3.0, 4.0], &[0.0, 0.0]) - 25.0).abs() < 1e-12);
    }
}
