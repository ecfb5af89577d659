//! Sparse subset selection: which `k` sketched basis vectors to project out.
//!
//! Every strategy answers the same question: given the sketched basis `SV`
//! (`s × j`, unit columns) and the sketched new vector `Sw`, pick an index set
//! `I` with `|I| = min(k, j)` and coefficients `h` so that `Sw − SV(:, I) h`
//! is small. Indices are zero-based. Ties are always broken towards the
//! lowest index.

use std::fmt;
use std::str::FromStr;

use crate::error::{arg_err, Error, Result};
use crate::linalg::vector::{dot, norm2, sub};
use crate::linalg::{least_squares, DenseMatrix, IncrementalLeastSquares, QrUpdatable};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Keep the `k` largest entries of the full least-squares coefficients.
    Pinv,
    /// As `Pinv`, then re-solve the least-squares problem on the kept columns.
    Pinv2,
    /// Keep the `k` largest correlations `SVᵀ Sw`, used as coefficients.
    Corr,
    /// As `Corr`, then re-solve the least-squares problem on the kept columns.
    CorrPinv,
    /// Orthogonal matching pursuit, `k` greedy picks.
    Omp,
    /// One outer iteration of subspace pursuit.
    Sp,
    /// Natarajan-style greedy with deflation of the candidate columns.
    Greedy,
    /// Exhaustive search; only for small `j`.
    BruteForce,
}

impl Strategy {
    pub const ALL: [Strategy; 8] = [
        Strategy::Pinv,
        Strategy::Pinv2,
        Strategy::Corr,
        Strategy::CorrPinv,
        Strategy::Omp,
        Strategy::Sp,
        Strategy::Greedy,
        Strategy::BruteForce,
    ];

    /// The seven heuristics (everything but the exhaustive oracle).
    pub const HEURISTICS: [Strategy; 7] = [
        Strategy::Pinv,
        Strategy::Pinv2,
        Strategy::Corr,
        Strategy::CorrPinv,
        Strategy::Omp,
        Strategy::Sp,
        Strategy::Greedy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Pinv => "pinv",
            Strategy::Pinv2 => "pinv2",
            Strategy::Corr => "corr",
            Strategy::CorrPinv => "corr-pinv",
            Strategy::Omp => "omp",
            Strategy::Sp => "sp",
            Strategy::Greedy => "greedy",
            Strategy::BruteForce => "bruteforce",
        }
    }

    /// Whether the strategy needs the full least-squares solution with `SV`.
    pub fn uses_full_least_squares(self) -> bool {
        matches!(self, Strategy::Pinv | Strategy::Pinv2)
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Strategy::ALL
            .into_iter()
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown selection strategy '{s}'")))
    }
}

/// Chosen index set (sorted, zero-based) and the aligned coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult<T> {
    pub indices: Vec<usize>,
    pub coeffs: Vec<T>,
}

impl<T: Real> SelectionResult<T> {
    /// `sw − sv(:, I) h`.
    pub fn residual(&self, sv: &DenseMatrix<T>, sw: &[T]) -> Vec<T> {
        let mut r = sw.to_vec();
        for (&i, &c) in self.indices.iter().zip(&self.coeffs) {
            for (ri, &vi) in r.iter_mut().zip(sv.col(i)) {
                *ri -= c * vi;
            }
        }
        r
    }

    pub fn residual_norm(&self, sv: &DenseMatrix<T>, sw: &[T]) -> T {
        norm2(&self.residual(sv, sw))
    }
}

fn score_key<T: Real>(v: T) -> T {
    if v.is_nan() {
        -T::one()
    } else {
        v.abs()
    }
}

/// Positions of the `k` entries of largest modulus (ties to the lowest
/// index), returned in ascending order.
pub fn top_k_by_modulus<T: Real>(values: &[T], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| {
        score_key(values[b])
            .partial_cmp(&score_key(values[a]))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx.sort_unstable();
    idx
}

/// Least squares restricted to the columns `idx` of `sv`.
pub fn restricted_least_squares<T: Real>(sv: &DenseMatrix<T>, idx: &[usize], sw: &[T]) -> Result<Vec<T>> {
    if idx.is_empty() {
        return Ok(Vec::new());
    }
    least_squares(&sv.select_cols(idx), sw)
}

fn check_inputs<T: Real>(sv: &DenseMatrix<T>, sw: &[T], k: usize) -> Result<()> {
    if sv.ncols() == 0 {
        return arg_err("selection: empty basis");
    }
    if sw.len() != sv.nrows() {
        return arg_err("selection: sw length differs from sketch rows");
    }
    if k == 0 {
        return arg_err("selection: k must be at least 1");
    }
    Ok(())
}

fn full_ls<T: Real>(sv: &DenseMatrix<T>, qr: Option<&QrUpdatable<T>>, sw: &[T]) -> Result<Vec<T>> {
    match qr {
        Some(f) if f.ncols() == sv.ncols() => Ok(f.solve(sw)?.x),
        _ => least_squares(sv, sw),
    }
}

fn restrict<T: Real>(full: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| full[i]).collect()
}

/// Runs `strategy` on `(sv, sw)`.
pub fn select<T: Real>(strategy: Strategy, sv: &DenseMatrix<T>, sw: &[T], k: usize) -> Result<SelectionResult<T>> {
    select_with_factorization(strategy, sv, None, sw, k)
}

/// As [`select`], reusing a QR factorization of all of `sv` when the strategy
/// needs the full least-squares solution.
pub fn select_with_factorization<T: Real>(
    strategy: Strategy,
    sv: &DenseMatrix<T>,
    qr: Option<&QrUpdatable<T>>,
    sw: &[T],
    k: usize,
) -> Result<SelectionResult<T>> {
    check_inputs(sv, sw, k)?;
    let res = match strategy {
        Strategy::Pinv => select_pinv(sv, qr, sw, k)?,
        Strategy::Pinv2 => select_pinv2(sv, qr, sw, k)?,
        Strategy::Corr => select_corr(sv, sw, k)?,
        Strategy::CorrPinv => select_corr_pinv(sv, sw, k)?,
        Strategy::Omp => select_omp(sv, sw, k)?,
        Strategy::Sp => select_sp(sv, sw, k)?,
        Strategy::Greedy => select_greedy(sv, sw, k)?,
        Strategy::BruteForce => select_bruteforce(sv, sw, k)?,
    };
    if res.indices.is_empty() {
        return Err(Error::Internal(format!("{strategy} returned an empty index set")));
    }
    Ok(res)
}

pub fn select_pinv<T: Real>(
    sv: &DenseMatrix<T>,
    qr: Option<&QrUpdatable<T>>,
    sw: &[T],
    k: usize,
) -> Result<SelectionResult<T>> {
    let h = full_ls(sv, qr, sw)?;
    let indices = top_k_by_modulus(&h, k);
    let coeffs = restrict(&h, &indices);
    Ok(SelectionResult { indices, coeffs })
}

pub fn select_pinv2<T: Real>(
    sv: &DenseMatrix<T>,
    qr: Option<&QrUpdatable<T>>,
    sw: &[T],
    k: usize,
) -> Result<SelectionResult<T>> {
    let h = full_ls(sv, qr, sw)?;
    let indices = top_k_by_modulus(&h, k);
    let coeffs = if indices.len() == sv.ncols() {
        h
    } else {
        restricted_least_squares(sv, &indices, sw)?
    };
    Ok(SelectionResult { indices, coeffs })
}

pub fn select_corr<T: Real>(sv: &DenseMatrix<T>, sw: &[T], k: usize) -> Result<SelectionResult<T>> {
    let scores = sv.tr_matvec(sw)?;
    let indices = top_k_by_modulus(&scores, k);
    let coeffs = restrict(&scores, &indices);
    Ok(SelectionResult { indices, coeffs })
}

pub fn select_corr_pinv<T: Real>(sv: &DenseMatrix<T>, sw: &[T], k: usize) -> Result<SelectionResult<T>> {
    let scores = sv.tr_matvec(sw)?;
    let indices = top_k_by_modulus(&scores, k);
    let coeffs = restricted_least_squares(sv, &indices, sw)?;
    Ok(SelectionResult { indices, coeffs })
}

/// Unselected column with the largest `|score|`, lowest index on ties.
fn best_unselected<T: Real>(scores: &[T], taken: &[bool]) -> Option<usize> {
    let mut best: Option<(usize, T)> = None;
    for (i, &sc) in scores.iter().enumerate() {
        if taken[i] {
            continue;
        }
        let key = score_key(sc);
        if best.is_none_or(|(_, b)| key > b) {
            best = Some((i, key));
        }
    }
    best.map(|(i, _)| i)
}

pub fn select_omp<T: Real>(sv: &DenseMatrix<T>, sw: &[T], k: usize) -> Result<SelectionResult<T>> {
    let j = sv.ncols();
    let kk = k.min(j);
    let mut taken = vec![false; j];
    let mut picked = Vec::with_capacity(kk);
    let mut ls = IncrementalLeastSquares::new(sw);
    let mut r = sw.to_vec();
    for _ in 0..kk {
        let scores = sv.tr_matvec(&r)?;
        let i = best_unselected(&scores, &taken).expect("fewer picks than columns");
        taken[i] = true;
        picked.push(i);
        ls.push_column(sv.col(i))?;
        let h = ls.solve().x;
        r = sw.to_vec();
        for (&c, &idx) in h.iter().zip(&picked) {
            for (ri, &vi) in r.iter_mut().zip(sv.col(idx)) {
                *ri -= c * vi;
            }
        }
    }
    picked.sort_unstable();
    let coeffs = restricted_least_squares(sv, &picked, sw)?;
    Ok(SelectionResult { indices: picked, coeffs })
}

pub fn select_sp<T: Real>(sv: &DenseMatrix<T>, sw: &[T], k: usize) -> Result<SelectionResult<T>> {
    let j = sv.ncols();
    if j <= k {
        let indices: Vec<usize> = (0..j).collect();
        let coeffs = least_squares(sv, sw)?;
        return Ok(SelectionResult { indices, coeffs });
    }
    let scores = sv.tr_matvec(sw)?;
    let i0 = top_k_by_modulus(&scores, k);
    let h0 = restricted_least_squares(sv, &i0, sw)?;
    let r = SelectionResult { indices: i0.clone(), coeffs: h0 }.residual(sv, sw);

    let rscores = sv.tr_matvec(&r)?;
    let mut in_i0 = vec![false; j];
    for &i in &i0 {
        in_i0[i] = true;
    }
    // Candidates outside I0, ranked by residual correlation.
    let outside: Vec<usize> = (0..j).filter(|&i| !in_i0[i]).collect();
    let outside_scores: Vec<T> = outside.iter().map(|&i| rscores[i]).collect();
    let extra: Vec<usize> = top_k_by_modulus(&outside_scores, k).into_iter().map(|p| outside[p]).collect();

    let mut merged: Vec<usize> = i0.iter().copied().chain(extra).collect();
    merged.sort_unstable();
    let h1 = restricted_least_squares(sv, &merged, sw)?;
    let indices: Vec<usize> = top_k_by_modulus(&h1, k).into_iter().map(|p| merged[p]).collect();
    let coeffs = restricted_least_squares(sv, &indices, sw)?;
    Ok(SelectionResult { indices, coeffs })
}

pub fn select_greedy<T: Real>(sv: &DenseMatrix<T>, sw: &[T], k: usize) -> Result<SelectionResult<T>> {
    let j = sv.ncols();
    let kk = k.min(j);
    let mut work: Vec<Vec<T>> = sv.cols().map(<[T]>::to_vec).collect();
    let orig_norms: Vec<T> = work.iter().map(|c| norm2(c)).collect();
    let cutoff = T::lit(1e-14);
    let mut r = sw.to_vec();
    let mut taken = vec![false; j];
    let mut picked = Vec::with_capacity(kk);
    for _ in 0..kk {
        let mut best: Option<(usize, T)> = None;
        for i in 0..j {
            if taken[i] {
                continue;
            }
            let ni = norm2(&work[i]);
            if ni <= cutoff * orig_norms[i].max(T::one()) {
                continue;
            }
            let key = score_key(dot(&work[i], &r) / ni);
            if best.is_none_or(|(_, b)| key > b) {
                best = Some((i, key));
            }
        }
        let i = match best {
            Some((i, _)) => i,
            // Every remaining column is deflated to zero: fall back to the tie rule.
            None => (0..j).find(|&i| !taken[i]).expect("fewer picks than columns"),
        };
        taken[i] = true;
        picked.push(i);
        let ni = norm2(&work[i]);
        if ni <= cutoff * orig_norms[i].max(T::one()) {
            continue;
        }
        let q: Vec<T> = work[i].iter().map(|&v| v / ni).collect();
        let qr = dot(&q, &r);
        for (ri, &qi) in r.iter_mut().zip(&q) {
            *ri -= qr * qi;
        }
        for (l, col) in work.iter_mut().enumerate() {
            if taken[l] {
                continue;
            }
            let c = dot(&q, col);
            for (ci, &qi) in col.iter_mut().zip(&q) {
                *ci -= c * qi;
            }
        }
    }
    picked.sort_unstable();
    let coeffs = restricted_least_squares(sv, &picked, sw)?;
    Ok(SelectionResult { indices: picked, coeffs })
}

/// Upper limit on the number of subsets the exhaustive search will visit.
pub const BRUTEFORCE_MAX_SUBSETS: u128 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k.min(n));
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Visits every `k`-subset of `0..j` in lexicographic order and keeps the
/// first one with the smallest objective value.
pub fn bruteforce_by<T: Real, F>(j: usize, k: usize, mut objective: F) -> Result<Vec<usize>>
where
    F: FnMut(&[usize]) -> Result<T>,
{
    let kk = k.min(j);
    if kk == 0 {
        return arg_err("bruteforce: nothing to select");
    }
    if binomial(j, kk) > BRUTEFORCE_MAX_SUBSETS {
        return arg_err(format!("bruteforce: C({j},{kk}) exceeds {BRUTEFORCE_MAX_SUBSETS}"));
    }
    let mut idx: Vec<usize> = (0..kk).collect();
    let mut best: Option<(Vec<usize>, T)> = None;
    loop {
        let val = objective(&idx)?;
        if best.as_ref().is_none_or(|(_, b)| val < *b) {
            best = Some((idx.clone(), val));
        }
        // Advance to the next combination.
        let mut p = kk;
        while p > 0 && idx[p - 1] == j - kk + p - 1 {
            p -= 1;
        }
        if p == 0 {
            break;
        }
        idx[p - 1] += 1;
        for q in p..kk {
            idx[q] = idx[q - 1] + 1;
        }
    }
    Ok(best.expect("at least one subset").0)
}

/// Exhaustive minimizer of the restricted least-squares residual.
pub fn select_bruteforce<T: Real>(sv: &DenseMatrix<T>, sw: &[T], k: usize) -> Result<SelectionResult<T>> {
    let indices = bruteforce_by(sv.ncols(), k, |idx| {
        let h = restricted_least_squares(sv, idx, sw)?;
        let fit = sv.select_cols(idx).matvec(&h)?;
        Ok(norm2(&sub(sw, &fit)))
    })?;
    let coeffs = restricted_least_squares(sv, &indices, sw)?;
    Ok(SelectionResult { indices, coeffs })
}
