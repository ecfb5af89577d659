#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use ssa_core::linalg::vector::norm2;
use ssa_core::linalg::{CsrMatrix, DenseMatrix};
use ssa_core::rng;

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> DenseMatrix<f64> {
    let mut g = rng::seeded(seed, 100);
    DenseMatrix::from_col_major(rows, cols, rng::normal_vec(&mut g, rows * cols)).unwrap()
}

pub fn gaussian_vector(n: usize, seed: u64) -> Vec<f64> {
    rng::normal_vec(&mut rng::seeded(seed, 101), n)
}

/// Random matrix with unit-norm columns.
pub fn unit_columns(rows: usize, cols: usize, seed: u64) -> DenseMatrix<f64> {
    let m = gaussian_matrix(rows, cols, seed);
    let cols: Vec<Vec<f64>> = m
        .cols()
        .map(|c| {
            let n = norm2(c);
            c.iter().map(|x| x / n).collect()
        })
        .collect();
    DenseMatrix::from_cols(rows, &cols).unwrap()
}

pub fn unit(v: &[f64]) -> Vec<f64> {
    let n = norm2(v);
    v.iter().map(|x| x / n).collect()
}

/// Sparse random square matrix: diagonal plus a few off-diagonals per row.
pub fn random_sparse(n: usize, per_row: usize, seed: u64) -> CsrMatrix<f64> {
    let mut g = rng::seeded(seed, 102);
    let mut trip = Vec::new();
    for i in 0..n {
        trip.push((i, i, 2.0 + g.random::<f64>()));
        for _ in 0..per_row {
            let j = g.random_range(0..n);
            trip.push((i, j, g.random::<f64>() - 0.5));
        }
    }
    CsrMatrix::from_triplets(n, n, &trip).unwrap()
}

/// Dense Gaussian matrix with `N(0, 1/n)` entries stored as CSR; its
/// spectrum fills the unit disk, so Krylov vectors do not nearly repeat.
pub fn gaussian_operator(n: usize, seed: u64) -> CsrMatrix<f64> {
    let g = gaussian_matrix(n, n, seed).scaled(1.0 / (n as f64).sqrt());
    CsrMatrix::from_dense(&g)
}

pub fn to_na(m: &DenseMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(m.nrows(), m.ncols(), m.as_slice())
}

/// Singular values from nalgebra, descending.
pub fn na_singular_values(m: &DenseMatrix<f64>) -> Vec<f64> {
    let mut s: Vec<f64> = to_na(m).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.partial_cmp(a).unwrap());
    s
}

pub fn na_cond(m: &DenseMatrix<f64>) -> f64 {
    let s = na_singular_values(m);
    s[0] / s[s.len() - 1]
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// The 4×3 basis used by the selection fixtures (unit columns).
pub fn fixture_basis() -> DenseMatrix<f64> {
    let r = 1.0 / 5f64.sqrt();
    DenseMatrix::from_rows(&[
        vec![r, 0.0, 0.0],
        vec![2.0 * r, 2.0 * r, 0.0],
        vec![0.0, r, r],
        vec![0.0, 0.0, 2.0 * r],
    ])
    .unwrap()
}
