//! Singular-value histograms on a log₁₀ scale.

use crate::error::{Error, Result};
use crate::linalg::{singular_values, DenseMatrix};
use crate::scalar::Real;

/// Values within this many bin widths below an edge are counted in the bin
/// starting at that edge, so that `1 − 1e-16` lands next to `1`.
const EDGE_SNAP: f64 = 1e-9;

/// Bin `i` covers `[10^{(lo+i)/b}, 10^{(lo+i+1)/b})` with `b` bins per decade.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Histogram {
    pub bins_per_decade: usize,
    /// Exponent index of the first bin's left edge, in units of `1/b` decades.
    pub lower_index: i64,
    pub counts: Vec<usize>,
    /// Exactly zero singular values (no logarithm).
    pub zero_count: usize,
}

impl Histogram {
    pub fn total(&self) -> usize {
        self.counts.iter().sum::<usize>() + self.zero_count
    }

    /// `(left, right)` edges of every bin.
    pub fn edges(&self) -> Vec<(f64, f64)> {
        let b = self.bins_per_decade as f64;
        (0..self.counts.len() as i64)
            .map(|i| {
                let k = (self.lower_index + i) as f64;
                (10f64.powf(k / b), 10f64.powf((k + 1.0) / b))
            })
            .collect()
    }

    /// Indices of bins with a nonzero count.
    pub fn occupied(&self) -> Vec<usize> {
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(|(i, _)| i).collect()
    }
}

fn bin_index<T: Real>(v: T, b: usize) -> i64 {
    let t = v.to_f64_lossy().log10() * b as f64;
    (t + EDGE_SNAP).floor() as i64
}

/// Buckets non-negative `values` into `bins_per_decade` log-spaced bins per
/// decade, spanning the smallest to the largest positive value.
pub fn histogram_of_values<T: Real>(values: &[T], bins_per_decade: usize) -> Result<Histogram> {
    if bins_per_decade == 0 {
        return Err(Error::Argument("bins_per_decade must be positive".into()));
    }
    if values.iter().any(|v| !(*v >= T::zero()) || !v.is_finite()) {
        return Err(Error::Domain("histogram values must be finite and non-negative".into()));
    }
    let idx: Vec<i64> = values.iter().filter(|v| **v > T::zero()).map(|&v| bin_index(v, bins_per_decade)).collect();
    let zero_count = values.len() - idx.len();
    let (lo, hi) = match (idx.iter().min(), idx.iter().max()) {
        (Some(&lo), Some(&hi)) => (lo, hi),
        _ => return Ok(Histogram { bins_per_decade, lower_index: 0, counts: Vec::new(), zero_count }),
    };
    let mut counts = vec![0; (hi - lo + 1) as usize];
    for i in idx {
        counts[(i - lo) as usize] += 1;
    }
    Ok(Histogram { bins_per_decade, lower_index: lo, counts, zero_count })
}

/// Histogram of the singular values of `v`.
pub fn singular_value_histogram<T: Real>(v: &DenseMatrix<T>, bins_per_decade: usize) -> Result<Histogram> {
    histogram_of_values(&singular_values(v)?, bins_per_decade)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthonormal_single_bin() {
        let h = singular_value_histogram(&DenseMatrix::<f64>::identity(5), 1).unwrap();
        assert_eq!(h.counts, vec![5]);
        assert_eq!(h.lower_index, 0);
    }

    #[test]
    fn separated_bins() {
        let h = singular_value_histogram(&DenseMatrix::diag(&[1.0, 1e-8]), 1).unwrap();
        assert_eq!(h.occupied(), vec![0, 8]);
        assert_eq!(h.total(), 2);
        assert_eq!(h.lower_index, -8);
    }
}
