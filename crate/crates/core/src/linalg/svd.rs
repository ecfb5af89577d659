//! Singular values by one-sided (Hestenes) Jacobi applied to the `R` factor
//! of a preliminary Householder QR.

use crate::error::{arg_err, Result};
use crate::linalg::vector::{dot, norm2};
use crate::linalg::{DenseMatrix, QrUpdatable};
use crate::scalar::Real;

const MAX_SWEEPS: usize = 80;

/// Thin SVD `M = U diag(s) Vᵀ` with `s` descending.
///
/// `u` is `nrows × p`, `v` is `ncols × p`, `p = min(nrows, ncols)`. Columns of
/// `u` belonging to exactly zero singular values are left as zero vectors.
#[derive(Debug, Clone)]
pub struct Svd<T> {
    pub u: DenseMatrix<T>,
    pub s: Vec<T>,
    pub v: DenseMatrix<T>,
}

fn rotate<T: Real>(x: &mut [T], y: &mut [T], c: T, s: T) {
    for (xi, yi) in x.iter_mut().zip(y.iter_mut()) {
        let (a, b) = (*xi, *yi);
        *xi = c * a - s * b;
        *yi = s * a + c * b;
    }
}

fn pair_mut<T>(v: &mut [Vec<T>], p: usize, q: usize) -> (&mut Vec<T>, &mut Vec<T>) {
    debug_assert!(p < q);
    let (lo, hi) = v.split_at_mut(q);
    (&mut lo[p], &mut hi[0])
}

/// Orthogonalizes the columns of `w` in place by plane rotations; the same
/// rotations are applied to `acc` when given.
fn jacobi<T: Real>(w: &mut [Vec<T>], mut acc: Option<&mut [Vec<T>]>) {
    let n = w.len();
    let eps = T::epsilon();
    let mut norms: Vec<T> = w.iter().map(|c| dot(c, c)).collect();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (a, b) = (norms[p], norms[q]);
                if a == T::zero() || b == T::zero() {
                    continue;
                }
                let g = dot(&w[p], &w[q]);
                if g.abs() <= eps * (a * b).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (g + g);
                let t = zeta.signum() / (zeta.abs() + T::one().hypot(zeta));
                let c = T::one() / T::one().hypot(t);
                let s = c * t;
                let (wp, wq) = pair_mut(w, p, q);
                rotate(wp, wq, c, s);
                norms[p] = dot(wp, wp);
                norms[q] = dot(wq, wq);
                if let Some(acc) = acc.as_deref_mut() {
                    let (vp, vq) = pair_mut(acc, p, q);
                    rotate(vp, vq, c, s);
                }
            }
        }
        if !rotated {
            break;
        }
    }
}

fn descending_order<T: Real>(s: &[T]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..s.len()).collect();
    idx.sort_by(|&i, &j| s[j].partial_cmp(&s[i]).unwrap_or(std::cmp::Ordering::Equal).then(i.cmp(&j)));
    idx
}

fn columns<T: Real>(m: &DenseMatrix<T>) -> Vec<Vec<T>> {
    m.cols().map(<[T]>::to_vec).collect()
}

/// Singular values of the square upper-triangular factor held by `qr`.
pub(crate) fn singular_values_of_factor<T: Real>(qr: &QrUpdatable<T>) -> Vec<T> {
    let mut w = columns(&qr.r());
    jacobi(&mut w, None);
    let mut s: Vec<T> = w.iter().map(|c| norm2(c)).collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    s
}

/// `cond2` of every leading block `M[:, ..j]`, `j = 1..=ncols`.
///
/// Reuses one growing QR, so the cost is a small Jacobi SVD per prefix
/// rather than a full SVD of each tall block.
pub fn cond_profile<T: Real>(m: &DenseMatrix<T>) -> Result<Vec<T>> {
    if m.ncols() > m.nrows() {
        return arg_err("cond_profile: more columns than rows");
    }
    let mut qr = QrUpdatable::new(m.nrows());
    let mut out = Vec::with_capacity(m.ncols());
    for c in m.cols() {
        qr.append_column(c)?;
        out.push(ratio(&singular_values_of_factor(&qr)));
    }
    Ok(out)
}

/// Singular values in descending order.
pub fn singular_values<T: Real>(m: &DenseMatrix<T>) -> Result<Vec<T>> {
    if m.is_empty() {
        return arg_err("singular_values: empty matrix");
    }
    let tall = if m.nrows() >= m.ncols() { m.clone() } else { m.transpose() };
    Ok(singular_values_of_factor(&QrUpdatable::from_matrix(&tall)?))
}

/// Thin singular value decomposition.
pub fn svd<T: Real>(m: &DenseMatrix<T>) -> Result<Svd<T>> {
    if m.is_empty() {
        return arg_err("svd: empty matrix");
    }
    if m.nrows() < m.ncols() {
        let t = svd(&m.transpose())?;
        return Ok(Svd { u: t.v, s: t.s, v: t.u });
    }
    let n = m.ncols();
    let qr = QrUpdatable::from_matrix(m)?;
    let mut w = columns(&qr.r());
    let mut acc = columns(&DenseMatrix::identity(n));
    jacobi(&mut w, Some(&mut acc));
    let sig: Vec<T> = w.iter().map(|c| norm2(c)).collect();
    let order = descending_order(&sig);
    let mut u = DenseMatrix::with_rows(m.nrows());
    let mut v = DenseMatrix::with_rows(n);
    let mut s = Vec::with_capacity(n);
    for &i in &order {
        let si = sig[i];
        let mut z = vec![T::zero(); m.nrows()];
        if si > T::zero() {
            for (zk, &wk) in z.iter_mut().zip(&w[i]) {
                *zk = wk / si;
            }
            z = qr.q_mul(&z)?;
        }
        u.push_col(&z)?;
        v.push_col(&acc[i])?;
        s.push(si);
    }
    Ok(Svd { u, s, v })
}

/// Two-norm condition number `σ_max / σ_min`; `+∞` when `σ_min` is exactly
/// zero and NaN for an empty matrix.
pub fn cond2<T: Real>(m: &DenseMatrix<T>) -> T {
    match singular_values(m) {
        Ok(s) => ratio(&s),
        Err(_) => T::nan(),
    }
}

pub(crate) fn ratio<T: Real>(s: &[T]) -> T {
    let (max, min) = (s[0], s[s.len() - 1]);
    if min == T::zero() {
        T::infinity()
    } else {
        max / min
    }
}

/// Minimum-norm solution of `R x = c` for square `R`, truncating singular
/// values below `max(nrows, n) · eps · σ_max`.
pub(crate) fn min_norm_solve_upper<T: Real>(r: &DenseMatrix<T>, c: &[T], nrows: usize) -> Vec<T> {
    let n = r.ncols();
    let Ok(d) = svd(r) else {
        return vec![T::zero(); n];
    };
    let tol = T::from_usize_lossy(nrows.max(n)) * T::epsilon() * d.s[0];
    let mut x = vec![T::zero(); n];
    for (i, &si) in d.s.iter().enumerate() {
        if si <= tol || si == T::zero() {
            continue;
        }
        let coef = dot(d.u.col(i), c) / si;
        for (xk, &vk) in x.iter_mut().zip(d.v.col(i)) {
            *xk += coef * vk;
        }
    }
    x
}
