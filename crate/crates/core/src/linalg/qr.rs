use crate::error::{arg_err, Result};
use crate::linalg::svd::min_norm_solve_upper;
use crate::linalg::vector::{dot, norm2};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// Householder QR factorization that grows one column at a time.
///
/// Reflector `k` acts on rows `k..nrows` and is stored as a vector with an
/// implicit leading one. `R` is kept with a non-negative diagonal: whenever a
/// reflector produces a negative pivot, row `k` of `R` and column `k` of `Q`
/// are both negated (recorded in `signs`).
///
/// Appending a column costs `O(nrows * ncols)`.
#[derive(Debug, Clone)]
pub struct QrUpdatable<T> {
    nrows: usize,
    reflectors: Vec<Vec<T>>,
    taus: Vec<T>,
    r_cols: Vec<Vec<T>>,
    signs: Vec<T>,
}

/// Least-squares solution returned by [`QrUpdatable::solve`].
#[derive(Debug, Clone)]
pub struct QrSolution<T> {
    pub x: Vec<T>,
    /// `R` was numerically rank deficient; `x` is the minimum-norm solution.
    pub rank_deficient: bool,
}

fn householder<T: Real>(x: &[T]) -> (Vec<T>, T, T) {
    let mut v = x.to_vec();
    let alpha = norm2(x);
    if alpha == T::zero() {
        if let Some(first) = v.first_mut() {
            *first = T::one();
        }
        return (v, T::zero(), T::zero());
    }
    let x0 = x[0];
    let beta = if x0 >= T::zero() { -alpha } else { alpha };
    let denom = x0 - beta;
    for vi in v.iter_mut().skip(1) {
        *vi /= denom;
    }
    v[0] = T::one();
    let tau = (beta - x0) / beta;
    (v, tau, beta)
}

#[inline]
fn reflect<T: Real>(v: &[T], tau: T, y: &mut [T]) {
    if tau == T::zero() {
        return;
    }
    let s = tau * dot(v, y);
    for (yi, &vi) in y.iter_mut().zip(v) {
        *yi -= s * vi;
    }
}

impl<T: Real> QrUpdatable<T> {
    pub fn new(nrows: usize) -> Self {
        Self { nrows, reflectors: Vec::new(), taus: Vec::new(), r_cols: Vec::new(), signs: Vec::new() }
    }

    /// Factorizes all columns of `m`.
    pub fn from_matrix(m: &DenseMatrix<T>) -> Result<Self> {
        let mut qr = Self::new(m.nrows());
        for c in m.cols() {
            qr.append_column(c)?;
        }
        Ok(qr)
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.taus.len()
    }

    /// Applies the stored reflectors (without the sign fix-up) in order.
    fn apply_reflectors(&self, y: &mut [T]) {
        for (k, (v, &tau)) in self.reflectors.iter().zip(&self.taus).enumerate() {
            reflect(v, tau, &mut y[k..]);
        }
    }

    /// Appends `col` as a new last column. Earlier columns are untouched.
    pub fn append_column(&mut self, col: &[T]) -> Result<()> {
        if col.len() != self.nrows {
            return arg_err(format!("column length {} != nrows {}", col.len(), self.nrows));
        }
        let k = self.ncols();
        if k >= self.nrows {
            return arg_err("cannot append more columns than rows");
        }
        let mut y = col.to_vec();
        self.apply_reflectors(&mut y);
        let (v, tau, beta) = householder(&y[k..]);
        let sign = if beta < T::zero() { -T::one() } else { T::one() };
        let mut rc: Vec<T> = y[..k].iter().zip(&self.signs).map(|(&yi, &d)| yi * d).collect();
        rc.push(beta.abs());
        self.reflectors.push(v);
        self.taus.push(tau);
        self.signs.push(sign);
        self.r_cols.push(rc);
        Ok(())
    }

    /// `Qᵀ y` for a full-length `y` (length `nrows`).
    pub fn qt_mul(&self, y: &[T]) -> Result<Vec<T>> {
        if y.len() != self.nrows {
            return arg_err("qt_mul: length mismatch");
        }
        let mut z = y.to_vec();
        self.apply_reflectors(&mut z);
        for (zi, &d) in z.iter_mut().zip(&self.signs) {
            *zi *= d;
        }
        Ok(z)
    }

    /// `Q z` for a full-length `z` (the full orthogonal factor, nrows × nrows).
    pub fn q_mul(&self, z: &[T]) -> Result<Vec<T>> {
        if z.len() != self.nrows {
            return arg_err("q_mul: length mismatch");
        }
        let mut y = z.to_vec();
        for (yi, &d) in y.iter_mut().zip(&self.signs) {
            *yi *= d;
        }
        for (k, (v, &tau)) in self.reflectors.iter().zip(&self.taus).enumerate().rev() {
            reflect(v, tau, &mut y[k..]);
        }
        Ok(y)
    }

    /// Upper-triangular factor, `ncols × ncols`.
    pub fn r(&self) -> DenseMatrix<T> {
        let n = self.ncols();
        let mut r = DenseMatrix::zeros(n, n);
        for (j, c) in self.r_cols.iter().enumerate() {
            for (i, &v) in c.iter().enumerate() {
                r.set(i, j, v);
            }
        }
        r
    }

    pub fn r_diag(&self) -> Vec<T> {
        self.r_cols.iter().map(|c| *c.last().expect("nonempty column")).collect()
    }

    /// Orthonormal basis of the range of the committed columns, `nrows × ncols`.
    pub fn thin_q(&self) -> DenseMatrix<T> {
        let mut q = DenseMatrix::with_rows(self.nrows);
        for i in 0..self.ncols() {
            let mut e = vec![T::zero(); self.nrows];
            e[i] = T::one();
            q.push_col(&self.q_mul(&e).expect("length matches")).expect("length matches");
        }
        q
    }

    /// The `i`-th column of `Q` beyond the committed ones: a unit vector
    /// orthogonal to the range of the factored matrix.
    pub fn complement_vector(&self, i: usize) -> Result<Vec<T>> {
        let idx = self.ncols() + i;
        if idx >= self.nrows {
            return arg_err("no room in the orthogonal complement");
        }
        let mut e = vec![T::zero(); self.nrows];
        e[idx] = T::one();
        self.q_mul(&e)
    }

    /// `Q [R; 0]`, i.e. the factored matrix rebuilt from its factors.
    pub fn reconstruct(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::with_rows(self.nrows);
        for c in &self.r_cols {
            let mut z = vec![T::zero(); self.nrows];
            z[..c.len()].copy_from_slice(c);
            m.push_col(&self.q_mul(&z).expect("length matches")).expect("length matches");
        }
        m
    }

    /// Solves `R x = c` for the leading `ncols` entries of `c`, falling back
    /// to a minimum-norm solve when a pivot is below the rank tolerance.
    pub(crate) fn solve_transformed(&self, c: &[T]) -> QrSolution<T> {
        let n = self.ncols();
        let diag = self.r_diag();
        let dmax = diag.iter().fold(T::zero(), |a, &b| a.max(b));
        let dmin = diag.iter().fold(T::infinity(), |a, &b| a.min(b));
        let tol = T::from_usize_lossy(self.nrows.max(n)) * T::epsilon() * dmax;
        if n > 0 && (dmax == T::zero() || dmin <= tol) {
            let x = min_norm_solve_upper(&self.r(), &c[..n], self.nrows);
            return QrSolution { x, rank_deficient: true };
        }
        let mut x = c[..n].to_vec();
        for i in (0..n).rev() {
            let mut acc = x[i];
            for (col, &xj) in self.r_cols[i + 1..n].iter().zip(&x[i + 1..n]) {
                acc -= col[i] * xj;
            }
            x[i] = acc / self.r_cols[i][i];
        }
        QrSolution { x, rank_deficient: false }
    }

    /// Least-squares solve `argmin ‖M x − rhs‖` with the factored `M`.
    pub fn solve(&self, rhs: &[T]) -> Result<QrSolution<T>> {
        let c = self.qt_mul(rhs)?;
        Ok(self.solve_transformed(&c))
    }
}

/// Least-squares problem `argmin ‖M y − b‖` where `M` grows by columns.
///
/// Keeps `Qᵀ b` up to date so the residual norm is available after every
/// append in `O(nrows)` extra work.
#[derive(Debug, Clone)]
pub struct IncrementalLeastSquares<T> {
    qr: QrUpdatable<T>,
    qtb: Vec<T>,
}

impl<T: Real> IncrementalLeastSquares<T> {
    pub fn new(rhs: &[T]) -> Self {
        Self { qr: QrUpdatable::new(rhs.len()), qtb: rhs.to_vec() }
    }

    pub fn push_column(&mut self, col: &[T]) -> Result<()> {
        self.qr.append_column(col)?;
        let k = self.qr.ncols() - 1;
        reflect(&self.qr.reflectors[k], self.qr.taus[k], &mut self.qtb[k..]);
        Ok(())
    }

    pub fn ncols(&self) -> usize {
        self.qr.ncols()
    }

    pub fn factorization(&self) -> &QrUpdatable<T> {
        &self.qr
    }

    /// `min_y ‖M y − b‖` for the current columns.
    pub fn residual_norm(&self) -> T {
        norm2(&self.qtb[self.qr.ncols()..])
    }

    pub fn solve(&self) -> QrSolution<T> {
        let c: Vec<T> = self.qtb[..self.qr.ncols()]
            .iter()
            .zip(&self.qr.signs)
            .map(|(&v, &d)| v * d)
            .collect();
        self.qr.solve_transformed(&c)
    }
}
