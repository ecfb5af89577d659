//! Bounds on the conditioning of `[V, v]` given `V` and a unit vector `v`.
//!
//! Notation: `σ` is `σ_min(V)`, `α = ‖Vᵀ v‖`. Columns of `V` are assumed to
//! have unit norm, so `σ ≤ 1 ≤ σ_max(V)`. All bounds need `α < σ`.

use crate::error::{Error, Result};
use crate::linalg::vector::{dot, norm2};
use crate::linalg::{singular_values, svd, DenseMatrix, QrUpdatable};
use crate::scalar::Real;

fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

fn check_alpha<T: Real>(sigma_min: T, alpha: T) -> Result<()> {
    if !(sigma_min > T::zero()) {
        return domain(format!("sigma_min must be positive, got {sigma_min}"));
    }
    if !(alpha >= T::zero()) {
        return domain(format!("alpha must be non-negative, got {alpha}"));
    }
    if alpha >= sigma_min {
        return domain(format!("alpha ({alpha}) must be below sigma_min ({sigma_min})"));
    }
    Ok(())
}

/// `η = ‖(VᵀV)^{-1/2} Vᵀ v‖`, the norm of the orthogonal projection of `v`
/// onto `range(V)`, and `((1+η)/(1−η))^{1/2}`, which bounds the growth
/// factor `cond([V, v]) / cond(V)`. The factor is `+∞` when `η ≥ 1`.
pub fn eta_bound<T: Real>(v: &DenseMatrix<T>, vnew: &[T]) -> Result<(T, T)> {
    if vnew.len() != v.nrows() {
        return Err(Error::Argument(format!("vector has length {}, expected {}", vnew.len(), v.nrows())));
    }
    let d = svd(v)?;
    let smax = d.s.first().copied().unwrap_or(T::zero());
    let tol = crate::linalg::rank_tolerance(v.nrows(), v.ncols(), smax);
    let mut acc = T::zero();
    for (i, &s) in d.s.iter().enumerate() {
        if s > tol {
            let c = dot(d.u.col(i), vnew);
            acc += c * c;
        }
    }
    let eta = acc.sqrt();
    let factor = if eta < T::one() { ((T::one() + eta) / (T::one() - eta)).sqrt() } else { T::infinity() };
    Ok((eta, factor))
}

/// Lower bound on `σ_min([V, v])²`:
/// `(1 + σ² − √((1 − σ²)² + 4α²)) / 2`.
pub fn sigma_min_lower_bound<T: Real>(sigma_min: T, alpha: T) -> Result<T> {
    check_alpha(sigma_min, alpha)?;
    // A unit column measures at 1 + O(eps); only reject genuine excess.
    if sigma_min > T::one() + T::lit(1e-12) {
        return domain(format!("sigma_min ({sigma_min}) exceeds 1; columns are not unit norm"));
    }
    Ok(lower_sq(sigma_min, alpha))
}

// Smaller eigenvalue of [[σ², α], [α, 1]], written as det / larger eigenvalue
// to avoid cancellation; exact (σ²) when α = 0.
fn lower_sq<T: Real>(sigma: T, alpha: T) -> T {
    let one = T::one();
    let s2 = sigma * sigma;
    let d = one - s2;
    let big = (one + s2 + (d * d + T::lit(4.0) * alpha * alpha).sqrt()) / T::lit(2.0);
    (s2 - alpha * alpha) / big
}

fn upper_sq<T: Real>(sigma_max: T, alpha: T) -> T {
    let one = T::one();
    let s2 = sigma_max * sigma_max;
    let d = s2 - one;
    (one + s2 + (d * d + T::lit(4.0) * alpha * alpha).sqrt()) / T::lit(2.0)
}

/// Upper bound on `cond([V, v])²`: the largest eigenvalue bound over the
/// smallest one.
pub fn cond_upper_bound<T: Real>(sigma_min: T, sigma_max: T, alpha: T) -> Result<T> {
    check_alpha(sigma_min, alpha)?;
    if sigma_max < sigma_min {
        return domain("sigma_max below sigma_min");
    }
    Ok(upper_sq(sigma_max, alpha) / lower_sq(sigma_min, alpha))
}

/// `2 / (1 + σ² − √((1 − σ²)² + 4α²))`, a lower bound on `cond([V, v])²`
/// reached by some unit `v` with `‖Vᵀv‖ = α` (since `σ_max([V, v]) ≥ 1`).
pub fn attainable_lower_cond_sq<T: Real>(sigma_min: T, alpha: T) -> Result<T> {
    Ok(T::one() / sigma_min_lower_bound(sigma_min, alpha)?)
}

/// Every bound evaluated for one `(V, v)` pair next to the measured values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundReport<T> {
    pub sigma_min_v: T,
    pub sigma_max_v: T,
    pub alpha: T,
    pub eta: T,
    pub lower_bound_sigma_min_sq: T,
    pub upper_bound_cond_sq: T,
    pub attainable_lower_cond_sq: T,
    pub measured_sigma_min_sq: T,
    pub measured_cond_sq: T,
}

impl<T: Real> BoundReport<T> {
    /// `cond_upper_bound / attainable_lower_cond_sq`.
    pub fn gap_factor(&self) -> T {
        self.upper_bound_cond_sq / self.attainable_lower_cond_sq
    }
}

/// Measures `[V, v]` and evaluates all bounds; fails when `α ≥ σ_min(V)`.
pub fn bound_report<T: Real>(v: &DenseMatrix<T>, vnew: &[T]) -> Result<BoundReport<T>> {
    let sv = singular_values(v)?;
    let (smax, smin) = (sv[0], sv[sv.len() - 1]);
    let alpha = norm2(&v.tr_matvec(vnew)?);
    let (eta, _) = eta_bound(v, vnew)?;
    let lower = sigma_min_lower_bound(smin, alpha)?;
    let upper = cond_upper_bound(smin, smax, alpha)?;
    let ext = singular_values(&v.with_col(vnew)?)?;
    let (emax, emin) = (ext[0], ext[ext.len() - 1]);
    let cond = if emin == T::zero() { T::infinity() } else { emax / emin };
    Ok(BoundReport {
        sigma_min_v: smin,
        sigma_max_v: smax,
        alpha,
        eta,
        lower_bound_sigma_min_sq: lower,
        upper_bound_cond_sq: upper,
        attainable_lower_cond_sq: T::one() / lower,
        measured_sigma_min_sq: emin * emin,
        measured_cond_sq: cond * cond,
    })
}

/// Unit vector `v*` with `Vᵀ v* = −α x̂`, where `x̂` is the unit eigenvector
/// of `VᵀV` for its smallest eigenvalue. For this vector
/// `σ_min([V, v*])² = sigma_min_lower_bound(σ_min(V), α)`.
///
/// `v*` is `−(α/λ_min) V x̂` plus a multiple of the first column of an
/// orthonormal basis of `range(V)^⊥` (taken from a Householder QR), scaled so
/// that `‖v*‖ = 1`.
pub fn adversarial_next_vector<T: Real>(v: &DenseMatrix<T>, alpha: T) -> Result<Vec<T>> {
    if v.ncols() == 0 {
        return Err(Error::Argument("basis has no columns".into()));
    }
    if v.ncols() >= v.nrows() {
        return Err(Error::Construction("no room for an orthogonal component".into()));
    }
    let d = svd(v)?;
    let last = d.s.len() - 1;
    let smin = d.s[last];
    check_alpha(smin, alpha)?;
    // V x̂ = σ_min u_min, so −(α/λ_min) V x̂ = −(α/σ_min) u_min.
    let r = alpha / smin;
    let residual = T::one() - r * r;
    if residual < T::zero() {
        return Err(Error::Construction("in-range component longer than 1".into()));
    }
    let q = QrUpdatable::from_matrix(v)?;
    let comp = q.complement_vector(0)?;
    let c = residual.sqrt();
    Ok(d.u.col(last).iter().zip(&comp).map(|(&u, &p)| -r * u + c * p).collect())
}

/// Iterates `x_{m+1}² = (1 + x_m² − √((1 − x_m²)² + 4α_m²)) / 2` with
/// `α_m = alpha_rule(x_m)`, returning `[x_{m0}, …, x_m]`.
pub fn decay_recurrence<T: Real, F>(x0: T, m0: usize, m: usize, alpha_rule: F) -> Result<Vec<T>>
where
    F: Fn(T) -> T,
{
    if !(x0 > T::zero() && x0 <= T::one()) {
        return domain(format!("x0 must lie in (0, 1], got {x0}"));
    }
    if m < m0 {
        return Err(Error::Argument(format!("m ({m}) below m0 ({m0})")));
    }
    let mut xs = Vec::with_capacity(m - m0 + 1);
    let mut x = x0;
    xs.push(x);
    for _ in m0..m {
        let a = alpha_rule(x);
        x = lower_sq(x, a).max(T::zero()).sqrt();
        xs.push(x);
    }
    Ok(xs)
}

/// `(7/8)^{steps/2} · x_{m0}`, the geometric envelope for `α_m = x_m / 2`.
pub fn decay_bound<T: Real>(x_m0: T, steps: usize) -> T {
    T::lit(0.875).powf(T::from_usize_lossy(steps) / T::lit(2.0)) * x_m0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn alpha_zero_is_identity() {
        assert_eq!(sigma_min_lower_bound(0.6, 0.0).unwrap(), 0.6 * 0.6);
        assert!((cond_upper_bound(1.0f64, 1.0, 0.0).unwrap() - 1.0).abs() < 1e-15);
        assert!(sigma_min_lower_bound(0.5, 0.5).is_err());
        assert!(sigma_min_lower_bound(1.5, 0.1).is_err());
    }

    #[test]
    fn e1_in_r3() {
        let v = DenseMatrix::<f64>::from_cols(3, &[vec![1.0, 0.0, 0.0]]).unwrap();
        let w = adversarial_next_vector(&v, 0.3).unwrap();
        assert!((norm2(&w) - 1.0).abs() < 1e-15);
        assert!((w[0] + 0.3).abs() < 1e-15);
        let s = singular_values(&v.with_col(&w).unwrap()).unwrap();
        assert!((s[1] * s[1] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn eta_hand_case() {
        let v = DenseMatrix::from_cols(3, &[vec![1.0, 0.0, 0.0]]).unwrap();
        let w = [0.5, (0.75f64).sqrt(), 0.0];
        let (eta, f) = eta_bound(&v, &w).unwrap();
        assert!((eta - 0.5).abs() < 1e-15);
        assert!((f - 3f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn constant_series_without_coupling() {
        let xs = decay_recurrence(0.4, 0, 10, |_| 0.0).unwrap();
        assert!(xs.iter().all(|&x| (x - 0.4f64).abs() < 1e-15));
    }
}
