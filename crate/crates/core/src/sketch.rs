//! Subspace-embedding operators `S ∈ R^{s×n}`.
//!
//! * `Srht`: subsampled randomized Hadamard transform. The input is zero-padded
//!   to `P = 2^q ≥ n`, multiplied by a random ±1 diagonal, transformed by the
//!   fast Walsh–Hadamard transform, and `s` distinct rows are kept. The
//!   overall scale is `sqrt(P/s)` times the orthonormal Hadamard matrix, so
//!   `E‖Sx‖² = ‖x‖²`.
//! * `Gaussian`: i.i.d. `N(0, 1/s)` entries regenerated from the seed on every
//!   application. Slow; kept as a reference embedding.
//! * `Identity`: `S = I`, requires `s = n`.
//!
//! Randomness comes from [`crate::rng`]: the sign diagonal is drawn first
//! (`P` booleans), then the row sample by a Fisher–Yates prefix of length `s`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::error::{arg_err, Error, Result};
use crate::linalg::vector::{axpy, norm2};
use crate::linalg::{singular_values, DenseMatrix, QrUpdatable};
use crate::rng::{self, stream};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SketchKind {
    Srht,
    Gaussian,
    Identity,
}

impl fmt::Display for SketchKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SketchKind::Srht => "srht",
            SketchKind::Gaussian => "gaussian",
            SketchKind::Identity => "identity",
        })
    }
}

impl FromStr for SketchKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "srht" => Ok(SketchKind::Srht),
            "gaussian" => Ok(SketchKind::Gaussian),
            "identity" => Ok(SketchKind::Identity),
            other => arg_err(format!("unknown sketch kind '{other}'")),
        }
    }
}

#[derive(Debug, Clone)]
enum Inner<T> {
    Srht { padded: usize, signs: Vec<T>, rows: Vec<usize> },
    Gaussian,
    Identity,
}

/// An embedding `S ∈ R^{s×n}` applied as an operator. Immutable once built.
#[derive(Debug, Clone)]
pub struct SketchOperator<T> {
    kind: SketchKind,
    n: usize,
    s: usize,
    seed: u64,
    inner: Inner<T>,
}

/// In-place unnormalized fast Walsh–Hadamard transform; `x.len()` must be a
/// power of two.
pub fn fwht<T: Real>(x: &mut [T]) {
    let n = x.len();
    debug_assert!(n.is_power_of_two());
    let mut h = 1;
    while h < n {
        for block in x.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (u, v) = (*a, *b);
                *a = u + v;
                *b = u - v;
            }
        }
        h *= 2;
    }
}

impl<T: Real> SketchOperator<T> {
    pub fn new(kind: SketchKind, n: usize, s: usize, seed: u64) -> Result<Self> {
        match kind {
            SketchKind::Srht => Self::srht(n, s, seed),
            SketchKind::Gaussian => Self::gaussian(n, s, seed),
            SketchKind::Identity => {
                if s != n {
                    return arg_err(format!("identity sketch needs s = n (got s={s}, n={n})"));
                }
                Self::identity(n)
            }
        }
    }

    /// Subsampled randomized Hadamard transform.
    pub fn srht(n: usize, s: usize, seed: u64) -> Result<Self> {
        if n == 0 {
            return arg_err("srht: n must be positive");
        }
        let padded = n.next_power_of_two();
        if s == 0 || s > padded {
            return arg_err(format!("srht: need 0 < s <= {padded} (got s={s})"));
        }
        let mut g = rng::seeded(seed, stream::SRHT);
        let signs: Vec<T> =
            (0..padded).map(|_| if g.random::<bool>() { T::one() } else { -T::one() }).collect();
        let mut perm: Vec<usize> = (0..padded).collect();
        for i in 0..s {
            let j = g.random_range(i..padded);
            perm.swap(i, j);
        }
        perm.truncate(s);
        Ok(Self { kind: SketchKind::Srht, n, s, seed, inner: Inner::Srht { padded, signs, rows: perm } })
    }

    pub fn gaussian(n: usize, s: usize, seed: u64) -> Result<Self> {
        if n == 0 || s == 0 {
            return arg_err("gaussian sketch: n and s must be positive");
        }
        Ok(Self { kind: SketchKind::Gaussian, n, s, seed, inner: Inner::Gaussian })
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return arg_err("identity sketch: n must be positive");
        }
        Ok(Self { kind: SketchKind::Identity, n, s: n, seed: 0, inner: Inner::Identity })
    }

    pub fn kind(&self) -> SketchKind {
        self.kind
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Sketch dimension.
    pub fn s(&self) -> usize {
        self.s
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Sampled Hadamard rows (SRHT only), in sampling order.
    pub fn sampled_rows(&self) -> Option<&[usize]> {
        match &self.inner {
            Inner::Srht { rows, .. } => Some(rows),
            _ => None,
        }
    }

    /// `S x`.
    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.n {
            return arg_err(format!("sketch apply: x has length {}, expected {}", x.len(), self.n));
        }
        Ok(match &self.inner {
            Inner::Identity => x.to_vec(),
            Inner::Srht { padded, signs, rows } => {
                let mut buf = vec![T::zero(); *padded];
                for ((b, &xi), &d) in buf.iter_mut().zip(x).zip(signs) {
                    *b = d * xi;
                }
                fwht(&mut buf);
                let scale = T::one() / T::from_usize_lossy(self.s).sqrt();
                rows.iter().map(|&r| buf[r] * scale).collect()
            }
            Inner::Gaussian => {
                let mut g = rng::seeded(self.seed, stream::GAUSSIAN_SKETCH);
                let scale = T::one() / T::from_usize_lossy(self.s).sqrt();
                let mut out = vec![T::zero(); self.s];
                let mut col = vec![T::zero(); self.s];
                for &xj in x {
                    for c in col.iter_mut() {
                        *c = rng::normal(&mut g);
                    }
                    axpy(xj * scale, &col, &mut out);
                }
                out
            }
        })
    }

    /// Applies `S` to every column.
    pub fn apply_matrix(&self, m: &DenseMatrix<T>) -> Result<DenseMatrix<T>> {
        let mut out = DenseMatrix::with_rows(self.s);
        for c in m.cols() {
            out.push_col(&self.apply(c)?)?;
        }
        Ok(out)
    }

    /// The explicit `s × n` matrix (for tests and small experiments).
    pub fn to_dense(&self) -> DenseMatrix<T> {
        let mut m = DenseMatrix::with_rows(self.s);
        for i in 0..self.n {
            let mut e = vec![T::zero(); self.n];
            e[i] = T::one();
            m.push_col(&self.apply(&e).expect("length matches")).expect("length matches");
        }
        m
    }
}

/// Smallest `ε` with `(1−ε)‖v‖² ≤ ‖Sv‖² ≤ (1+ε)‖v‖²` on the column span of
/// `basis`: `max(1 − σ_min², σ_max² − 1)` over the singular values of `S Q`,
/// where `Q` is an orthonormal basis of the span.
pub fn embedding_distortion<T: Real>(op: &SketchOperator<T>, basis: &DenseMatrix<T>) -> Result<T> {
    if basis.nrows() != op.n() {
        return arg_err("embedding_distortion: basis rows differ from sketch dimension n");
    }
    if basis.ncols() > op.s() {
        return arg_err(format!(
            "embedding_distortion: subspace dimension {} exceeds sketch size {}",
            basis.ncols(),
            op.s()
        ));
    }
    if basis.ncols() == 0 {
        return arg_err("embedding_distortion: empty basis");
    }
    let q = QrUpdatable::from_matrix(basis)?.thin_q();
    let sq = op.apply_matrix(&q)?;
    let sv = singular_values(&sq)?;
    let (max, min) = (sv[0], sv[sv.len() - 1]);
    let eps = (T::one() - min * min).max(max * max - T::one());
    Ok(eps.max(T::zero()))
}

/// `‖Sx‖² / ‖x‖²`; handy for Monte-Carlo checks.
pub fn norm_ratio_sq<T: Real>(op: &SketchOperator<T>, x: &[T]) -> Result<T> {
    let sx = op.apply(x)?;
    let (a, b) = (norm2(&sx), norm2(x));
    Ok((a * a) / (b * b))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fwht_matches_definition() {
        let mut x = vec![1.0, 2.0, 3.0, 4.0];
        fwht(&mut x);
        assert_eq!(x, vec![10.0, -2.0, -4.0, 0.0]);
    }

    #[test]
    fn one_dimensional_srht_is_sign_flip() {
        let op = SketchOperator::<f64>::srht(1, 1, 9).unwrap();
        let y = op.apply(&[2.5]).unwrap();
        assert_eq!(y[0].abs(), 2.5);
    }

    #[test]
    fn full_sampling_is_orthogonal() {
        let op = SketchOperator::<f64>::srht(8, 8, 4).unwrap();
        let mut g = rng::seeded(1, 0);
        let x: Vec<f64> = rng::normal_vec(&mut g, 8);
        assert!((norm2(&op.apply(&x).unwrap()) - norm2(&x)).abs() < 1e-12 * norm2(&x));
    }

    #[test]
    fn identity_and_zero() {
        let id = SketchOperator::<f64>::identity(2).unwrap();
        assert_eq!(id.apply(&[1.0, 2.0]).unwrap(), vec![1.0, 2.0]);
        let op = SketchOperator::<f64>::srht(10, 4, 2).unwrap();
        assert!(op.apply(&[0.0; 10]).unwrap().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bad_arguments() {
        assert!(SketchOperator::<f64>::srht(5, 9, 0).is_err());
        assert!(SketchOperator::<f64>::new(SketchKind::Identity, 5, 4, 0).is_err());
        let op = SketchOperator::<f64>::srht(5, 4, 0).unwrap();
        assert!(op.apply(&[1.0; 4]).is_err());
        let basis = DenseMatrix::<f64>::zeros(5, 5);
        assert!(embedding_distortion(&op, &basis).is_err());
    }

    #[test]
    fn sampled_rows_distinct_in_range() {
        let op = SketchOperator::<f64>::srht(1000, 300, 77).unwrap();
        let mut rows = op.sampled_rows().unwrap().to_vec();
        assert!(rows.iter().all(|&r| r < 1024));
        rows.sort_unstable();
        rows.dedup();
        assert_eq!(rows.len(), 300);
    }

    #[test]
    fn gaussian_is_deterministic() {
        let a = SketchOperator::<f64>::gaussian(6, 3, 5).unwrap();
        let b = SketchOperator::<f64>::gaussian(6, 3, 5).unwrap();
        let x = [1.0, -2.0, 0.5, 3.0, 0.0, 1.0];
        assert_eq!(a.apply(&x).unwrap(), b.apply(&x).unwrap());
    }
}
