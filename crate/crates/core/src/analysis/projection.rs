//! Effect of projecting a new vector against one basis column.

use crate::error::{Error, Result};
use crate::linalg::vector::{axpy, dot, norm2, scaled};
use crate::linalg::{cond2, singular_values, DenseMatrix};
use crate::scalar::Real;

/// `ŵ = (I − vᵢ vᵢ†) w`.
pub fn project_against<T: Real>(v: &DenseMatrix<T>, w: &[T], idx: usize) -> Result<Vec<T>> {
    if idx >= v.ncols() {
        return Err(Error::Argument(format!("column {idx} out of range ({} columns)", v.ncols())));
    }
    if w.len() != v.nrows() {
        return Err(Error::Argument(format!("vector has length {}, expected {}", w.len(), v.nrows())));
    }
    let vi = v.col(idx);
    let nn = dot(vi, vi);
    if nn == T::zero() {
        return Err(Error::Domain(format!("column {idx} is zero")));
    }
    let mut out = w.to_vec();
    axpy(-dot(vi, w) / nn, vi, &mut out);
    Ok(out)
}

fn extended<T: Real>(v: &DenseMatrix<T>, w_hat: &[T], normalized: bool) -> Result<DenseMatrix<T>> {
    if normalized {
        let n = norm2(w_hat);
        if n == T::zero() {
            return Err(Error::Domain("projected vector is zero".into()));
        }
        v.with_col(&scaled(T::one() / n, w_hat))
    } else {
        v.with_col(w_hat)
    }
}

/// `(cond2([V, ŵᵢ]), cond2([V, ŵᵢ/‖ŵᵢ‖]))` with `ŵᵢ` from [`project_against`].
pub fn cond_after_projection<T: Real>(v: &DenseMatrix<T>, w: &[T], idx: usize) -> Result<(T, T)> {
    let w_hat = project_against(v, w, idx)?;
    Ok((cond2(&extended(v, &w_hat, false)?), cond2(&extended(v, &w_hat, true)?)))
}

/// Loss-of-orthogonality measures of `G = [V, ŵᵢ]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossMetrics<T> {
    /// `‖I − GᵀG‖₂`
    pub identity_gap_2: T,
    /// `‖I − GᵀG‖_F`
    pub identity_gap_fro: T,
    /// `‖GᵀG‖₂`
    pub gram_2: T,
    /// `‖GᵀG‖_F`
    pub gram_fro: T,
}

impl<T: Real> LossMetrics<T> {
    pub fn as_array(&self) -> [T; 4] {
        [self.identity_gap_2, self.identity_gap_fro, self.gram_2, self.gram_fro]
    }

    pub const NAMES: [&'static str; 4] = ["identity_gap_2", "identity_gap_fro", "gram_2", "gram_fro"];
}

/// Metrics of `[V, ŵᵢ]`, with the new column scaled to unit norm when
/// `normalized`.
pub fn loss_of_orthogonality<T: Real>(
    v: &DenseMatrix<T>,
    w: &[T],
    idx: usize,
    normalized: bool,
) -> Result<LossMetrics<T>> {
    let w_hat = project_against(v, w, idx)?;
    let g = extended(v, &w_hat, normalized)?.gram();
    let gap = DenseMatrix::identity(g.nrows()).sub(&g)?;
    Ok(LossMetrics {
        identity_gap_2: singular_values(&gap)?[0],
        identity_gap_fro: gap.frobenius_norm(),
        gram_2: singular_values(&g)?[0],
        gram_fro: g.frobenius_norm(),
    })
}
