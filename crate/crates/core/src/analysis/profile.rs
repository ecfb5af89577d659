//! Dolan–Moré performance profiles for "larger is better" metrics.
//!
//! For problem `p` the best value is the largest metric any method reached.
//! The ratio of method `m` is `best / metric`, or `+∞` when the method failed
//! (no value, or a non-positive one). The curve of `m` at `θ` is the fraction
//! of problems with ratio `≤ θ`.

use std::fmt::Write;

use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfileData<T> {
    pub methods: Vec<String>,
    pub problems: Vec<String>,
    /// `metric[method][problem]`; `None` marks a failure.
    pub metric: Vec<Vec<Option<T>>>,
    /// `ratios[method][problem]`, `+∞` for failures.
    pub ratios: Vec<Vec<T>>,
    /// Per-method `(θ, y)` points at every breakpoint (shared across methods).
    pub curves: Vec<Vec<(T, T)>>,
}

impl<T: Real> ProfileData<T> {
    /// `y(θ)` for one method, evaluated from the ratios.
    pub fn y_at(&self, method: usize, theta: T) -> T {
        let r = &self.ratios[method];
        let hits = r.iter().filter(|&&x| x <= theta).count();
        T::from_usize_lossy(hits) / T::from_usize_lossy(r.len())
    }

    /// Fraction of problems the method solved at all.
    pub fn success_fraction(&self, method: usize) -> T {
        self.y_at(method, T::max_value())
    }

    /// CSV with header `method,theta,y`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,theta,y\n");
        for (name, curve) in self.methods.iter().zip(&self.curves) {
            for (theta, y) in curve {
                writeln!(out, "{name},{theta},{y}").expect("writing to String");
            }
        }
        out
    }
}

pub fn performance_profile<T: Real>(
    methods: &[String],
    problems: &[String],
    metric: &[Vec<Option<T>>],
) -> Result<ProfileData<T>> {
    if methods.is_empty() || problems.is_empty() {
        return Err(Error::Argument("profile needs at least one method and one problem".into()));
    }
    if metric.len() != methods.len() || metric.iter().any(|row| row.len() != problems.len()) {
        return Err(Error::Argument("metric table shape does not match methods × problems".into()));
    }
    let valid = |v: Option<T>| v.filter(|&x| x > T::zero() && x.is_finite());
    let best: Vec<Option<T>> = (0..problems.len())
        .map(|p| metric.iter().filter_map(|row| valid(row[p])).fold(None, |acc, x| Some(acc.map_or(x, |a: T| a.max(x)))))
        .collect();
    let ratios: Vec<Vec<T>> = metric
        .iter()
        .map(|row| {
            row.iter()
                .zip(&best)
                .map(|(&v, &b)| match (valid(v), b) {
                    (Some(x), Some(b)) => b / x,
                    _ => T::infinity(),
                })
                .collect()
        })
        .collect();

    let mut thetas: Vec<T> = ratios.iter().flatten().copied().filter(|r| r.is_finite()).collect();
    thetas.push(T::one());
    thetas.sort_by(|a, b| a.partial_cmp(b).expect("finite ratios"));
    thetas.dedup();

    let mut data = ProfileData {
        methods: methods.to_vec(),
        problems: problems.to_vec(),
        metric: metric.to_vec(),
        ratios,
        curves: Vec::new(),
    };
    data.curves = (0..methods.len()).map(|m| thetas.iter().map(|&t| (t, data.y_at(m, t))).collect()).collect();
    Ok(data)
}
