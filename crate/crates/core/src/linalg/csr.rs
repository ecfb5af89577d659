use crate::error::{arg_err, Result};
use crate::linalg::DenseMatrix;
use crate::scalar::Real;

/// Compressed sparse row matrix.
///
/// Invariants enforced on construction: `row_ptr` starts at zero, is
/// non-decreasing and ends at `nnz`; column indices are strictly increasing
/// inside every row and below `ncols`; all values are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix<T> {
    nrows: usize,
    ncols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<T>,
}

impl<T: Real> CsrMatrix<T> {
    pub fn new(
        nrows: usize,
        ncols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<usize>,
        values: Vec<T>,
    ) -> Result<Self> {
        if row_ptr.len() != nrows + 1 {
            return arg_err(format!("row_ptr has length {}, expected {}", row_ptr.len(), nrows + 1));
        }
        if row_ptr[0] != 0 {
            return arg_err("row_ptr[0] must be 0");
        }
        if col_idx.len() != values.len() || row_ptr[nrows] != col_idx.len() {
            return arg_err("row_ptr[nrows], col_idx and values disagree on nnz");
        }
        for r in 0..nrows {
            let (lo, hi) = (row_ptr[r], row_ptr[r + 1]);
            if lo > hi {
                return arg_err(format!("row_ptr decreases at row {r}"));
            }
            let cols = &col_idx[lo..hi];
            if cols.iter().any(|&c| c >= ncols) {
                return arg_err(format!("column index out of range in row {r}"));
            }
            if cols.windows(2).any(|w| w[0] >= w[1]) {
                return arg_err(format!("column indices not strictly increasing in row {r}"));
            }
        }
        if !values.iter().all(|v| v.is_finite()) {
            return arg_err("matrix values must be finite");
        }
        Ok(Self { nrows, ncols, row_ptr, col_idx, values })
    }

    /// Assembles from `(row, col, value)` triplets; duplicates are summed.
    pub fn from_triplets(nrows: usize, ncols: usize, triplets: &[(usize, usize, T)]) -> Result<Self> {
        let mut t: Vec<(usize, usize, T)> = triplets.to_vec();
        if let Some(&(r, c, _)) = t.iter().find(|&&(r, c, _)| r >= nrows || c >= ncols) {
            return arg_err(format!("triplet ({r}, {c}) outside {nrows}x{ncols}"));
        }
        t.sort_by_key(|a| (a.0, a.1));
        let mut row_ptr = vec![0usize; nrows + 1];
        let mut col_idx = Vec::with_capacity(t.len());
        let mut values: Vec<T> = Vec::with_capacity(t.len());
        let mut last: Option<(usize, usize)> = None;
        for (r, c, v) in t {
            if last == Some((r, c)) {
                *values.last_mut().expect("previous entry") += v;
            } else {
                col_idx.push(c);
                values.push(v);
                row_ptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for r in 0..nrows {
            row_ptr[r + 1] += row_ptr[r];
        }
        Self::new(nrows, ncols, row_ptr, col_idx, values)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            nrows: n,
            ncols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n).collect(),
            values: vec![T::one(); n],
        }
    }

    pub fn from_dense(m: &DenseMatrix<T>) -> Self {
        let mut t = Vec::new();
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                let v = m.get(i, j);
                if v != T::zero() {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), &t).expect("dense entries are finite and in range")
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[usize] {
        &self.col_idx
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn is_square(&self) -> bool {
        self.nrows == self.ncols
    }

    /// Iterates `(row, col, value)` in row-major order.
    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        (0..self.nrows).flat_map(move |r| {
            (self.row_ptr[r]..self.row_ptr[r + 1]).map(move |p| (r, self.col_idx[p], self.values[p]))
        })
    }

    /// `A x`
    pub fn spmv(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.ncols {
            return arg_err(format!("spmv: x has length {}, expected {}", x.len(), self.ncols));
        }
        let mut y = vec![T::zero(); self.nrows];
        self.spmv_into(x, &mut y);
        Ok(y)
    }

    /// `y = A x` without dimension checks beyond debug assertions.
    pub fn spmv_into(&self, x: &[T], y: &mut [T]) {
        debug_assert_eq!(x.len(), self.ncols);
        debug_assert_eq!(y.len(), self.nrows);
        for (r, yr) in y.iter_mut().enumerate() {
            let mut acc = T::zero();
            for p in self.row_ptr[r]..self.row_ptr[r + 1] {
                acc += self.values[p] * x[self.col_idx[p]];
            }
            *yr = acc;
        }
    }

    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::zeros(self.nrows, self.ncols);
        for (r, c, v) in self.triplets() {
            m.set(r, c, v);
        }
        m
    }

    pub fn transpose(&self) -> Self {
        let t: Vec<_> = self.triplets().map(|(r, c, v)| (c, r, v)).collect();
        Self::from_triplets(self.ncols, self.nrows, &t).expect("transpose of a valid matrix")
    }

    pub fn frobenius_norm(&self) -> T {
        self.values.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    /// Applies `A` to every column of `m`.
    pub fn mul_dense(&self, m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        if m.nrows() != self.ncols {
            return arg_err("mul_dense: dimension mismatch");
        }
        let mut out = DenseMatrix::with_rows(self.nrows);
        let mut y = vec![T::zero(); self.nrows];
        for c in m.cols() {
            self.spmv_into(c, &mut y);
            out.push_col(&y)?;
        }
        Ok(out)
    }
}
