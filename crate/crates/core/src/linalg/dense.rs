use crate::error::{arg_err, Result};
use crate::linalg::vector::{axpy, dot};
use crate::scalar::Real;

/// Column-major dense matrix.
///
/// Columns can be appended cheaply, which is how Krylov bases grow.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix<T> {
    nrows: usize,
    ncols: usize,
    data: Vec<T>,
}

impl<T> std::ops::Index<(usize, usize)> for DenseMatrix<T> {
    type Output = T;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &T {
        assert!(i < self.nrows && j < self.ncols, "index ({i}, {j}) out of bounds");
        &self.data[j * self.nrows + i]
    }
}

impl<T> std::ops::IndexMut<(usize, usize)> for DenseMatrix<T> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        assert!(i < self.nrows && j < self.ncols, "index ({i}, {j}) out of bounds");
        &mut self.data[j * self.nrows + i]
    }
}

impl<T: Real> DenseMatrix<T> {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Self { nrows, ncols, data: vec![T::zero(); nrows * ncols] }
    }

    /// Empty matrix with `nrows` rows, ready for [`push_col`](Self::push_col).
    pub fn with_rows(nrows: usize) -> Self {
        Self { nrows, ncols: 0, data: Vec::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_col_major(nrows: usize, ncols: usize, data: Vec<T>) -> Result<Self> {
        if data.len() != nrows * ncols {
            return arg_err(format!(
                "data length {} does not match {}x{}",
                data.len(),
                nrows,
                ncols
            ));
        }
        if !data.iter().all(|v| v.is_finite()) {
            return arg_err("matrix entries must be finite");
        }
        Ok(Self { nrows, ncols, data })
    }

    /// Builds a matrix from a list of rows (convenient for small literals).
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return arg_err("ragged rows");
        }
        let mut data = Vec::with_capacity(nrows * ncols);
        for j in 0..ncols {
            data.extend(rows.iter().map(|r| r[j]));
        }
        Self::from_col_major(nrows, ncols, data)
    }

    pub fn from_cols(nrows: usize, cols: &[Vec<T>]) -> Result<Self> {
        let mut m = Self::with_rows(nrows);
        for c in cols {
            m.push_col(c)?;
        }
        Ok(m)
    }

    pub fn diag(d: &[T]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, &v) in d.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    #[inline]
    pub fn nrows(&self) -> usize {
        self.nrows
    }

    #[inline]
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_empty(&self) -> bool {
        self.nrows == 0 || self.ncols == 0
    }

    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[j * self.nrows + i]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[j * self.nrows + i] = v;
    }

    #[inline]
    pub fn col(&self, j: usize) -> &[T] {
        &self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    #[inline]
    pub fn col_mut(&mut self, j: usize) -> &mut [T] {
        &mut self.data[j * self.nrows..(j + 1) * self.nrows]
    }

    pub fn cols(&self) -> impl Iterator<Item = &[T]> {
        (0..self.ncols).map(move |j| self.col(j))
    }

    pub fn push_col(&mut self, c: &[T]) -> Result<()> {
        if c.len() != self.nrows {
            return arg_err(format!("column length {} != nrows {}", c.len(), self.nrows));
        }
        self.data.extend_from_slice(c);
        self.ncols += 1;
        Ok(())
    }

    /// Removes the last column, if any.
    pub fn pop_col(&mut self) -> Option<Vec<T>> {
        if self.ncols == 0 {
            return None;
        }
        self.ncols -= 1;
        Some(self.data.split_off(self.ncols * self.nrows))
    }

    /// First `n` columns as a new matrix.
    pub fn leading_cols(&self, n: usize) -> Self {
        let n = n.min(self.ncols);
        Self { nrows: self.nrows, ncols: n, data: self.data[..n * self.nrows].to_vec() }
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.nrows);
        for &j in idx {
            data.extend_from_slice(self.col(j));
        }
        Self { nrows: self.nrows, ncols: idx.len(), data }
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.ncols, self.nrows);
        for j in 0..self.ncols {
            for i in 0..self.nrows {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    /// `self * x`
    pub fn matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.ncols {
            return arg_err(format!("matvec: x has length {}, expected {}", x.len(), self.ncols));
        }
        let mut y = vec![T::zero(); self.nrows];
        for (j, &xj) in x.iter().enumerate() {
            if xj != T::zero() {
                axpy(xj, self.col(j), &mut y);
            }
        }
        Ok(y)
    }

    /// `selfᵀ * x`
    pub fn tr_matvec(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.nrows {
            return arg_err(format!("tr_matvec: x has length {}, expected {}", x.len(), self.nrows));
        }
        Ok(self.cols().map(|c| dot(c, x)).collect())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.ncols != other.nrows {
            return arg_err("matmul: inner dimensions differ");
        }
        let mut out = Self::with_rows(self.nrows);
        for c in other.cols() {
            out.push_col(&self.matvec(c)?)?;
        }
        Ok(out)
    }

    /// Gram matrix `selfᵀ self`.
    pub fn gram(&self) -> Self {
        let n = self.ncols;
        let mut g = Self::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = dot(self.col(i), self.col(j));
                g.set(i, j, v);
                g.set(j, i, v);
            }
        }
        g
    }

    pub fn frobenius_norm(&self) -> T {
        self.data.iter().map(|&v| v * v).sum::<T>().sqrt()
    }

    pub fn scaled(&self, alpha: T) -> Self {
        Self { nrows: self.nrows, ncols: self.ncols, data: self.data.iter().map(|&v| alpha * v).collect() }
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        if self.nrows != other.nrows || self.ncols != other.ncols {
            return arg_err("sub: shape mismatch");
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| a - b).collect();
        Ok(Self { nrows: self.nrows, ncols: self.ncols, data })
    }

    /// Horizontal concatenation `[self, c]`.
    pub fn with_col(&self, c: &[T]) -> Result<Self> {
        let mut m = self.clone();
        m.push_col(c)?;
        Ok(m)
    }
}
