use crate::error::{arg_err, Result};
use crate::linalg::svd::min_norm_solve_upper;
use crate::linalg::{DenseMatrix, QrUpdatable};
use crate::scalar::Real;

/// Numerical-rank cutoff `max(nrows, ncols) · eps · σ_max`.
pub fn rank_tolerance<T: Real>(nrows: usize, ncols: usize, sigma_max: T) -> T {
    T::from_usize_lossy(nrows.max(ncols)) * T::epsilon() * sigma_max
}

/// `argmin_h ‖m h − rhs‖₂`; the minimum-norm minimizer when `m` is
/// numerically rank deficient (see [`rank_tolerance`]).
///
/// Computed from a Householder QR followed by an SVD of the small `R` factor,
/// so rank decisions are made on true singular values.
pub fn least_squares<T: Real>(m: &DenseMatrix<T>, rhs: &[T]) -> Result<Vec<T>> {
    if m.is_empty() {
        return arg_err("least_squares: empty matrix");
    }
    if m.nrows() < m.ncols() {
        return arg_err("least_squares: need nrows >= ncols");
    }
    if rhs.len() != m.nrows() {
        return arg_err("least_squares: rhs length mismatch");
    }
    let qr = QrUpdatable::from_matrix(m)?;
    let c = qr.qt_mul(rhs)?;
    Ok(min_norm_solve_upper(&qr.r(), &c[..m.ncols()], m.nrows()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_system() {
        let x = least_squares(&DenseMatrix::<f64>::identity(3), &[4.0, 5.0, 6.0]).unwrap();
        for (a, b) in x.iter().zip([4.0, 5.0, 6.0]) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn single_column_is_mean() {
        let m = DenseMatrix::<f64>::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let x = least_squares(&m, &[1.0, 3.0]).unwrap();
        assert!((x[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn rank_deficient_gives_minimum_norm() {
        // Two identical columns: any split of the coefficient fits; minimum norm splits evenly.
        let m = DenseMatrix::<f64>::from_rows(&[vec![1.0, 1.0], vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let x = least_squares(&m, &[2.0, 0.0, 0.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14, "{x:?}");
    }

    #[test]
    fn errors() {
        assert!(least_squares(&DenseMatrix::<f64>::zeros(0, 0), &[]).is_err());
        assert!(least_squares(&DenseMatrix::<f64>::zeros(1, 2), &[1.0]).is_err());
    }
}
