//! Krylov basis construction.
//!
//! One driver, [`ArnoldiProcess`], runs every method:
//!
//! | method | coefficients | projects against | normalization |
//! |---|---|---|---|
//! | `Full` | `vᵢᵀ w`, modified Gram–Schmidt, one conditional re-pass | all | `‖v‖ = 1` |
//! | `Truncated` | `vᵢᵀ w`, classical | last `k` | `‖v‖ = 1` |
//! | `TruncatedSketchedCoeffs` | `(Svᵢ)ᵀ(Sw)` | last `k` | `‖Sv‖ = 1` |
//! | `SketchedOrthonormal` | `(Svᵢ)ᵀ(Sw)`, one conditional re-pass | all | `‖Sv‖ = 1` |
//! | `SketchSelect(strategy)` | from [`crate::selection`] | `k` selected | `‖Sv‖ = 1` |
//!
//! Sketched methods update `w` and `Sw` by the same combination, so `SV` is
//! never recomputed from `V`. Whenever a sketch is supplied, `S A vⱼ` is kept
//! in `sav` (sketched GMRES needs it, whatever the method).
//!
//! The basis condition number is monitored through a Householder QR of `V`
//! that grows with the basis; singular values come from the small `R` factor.

use std::fmt;
use std::str::FromStr;

use crate::error::{arg_err, Error, Result};
use crate::linalg::singular_values_of_factor;
use crate::linalg::vector::{axpy, dot, norm2, scaled};
use crate::linalg::{CsrMatrix, DenseMatrix, QrUpdatable};
use crate::scalar::Real;
use crate::selection::{select_with_factorization, Strategy};
use crate::sketch::SketchOperator;

/// Threshold below which a projected vector triggers a second
/// orthogonalization pass (relative to its norm before projection).
const REORTH_RATIO: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Full,
    Truncated,
    TruncatedSketchedCoeffs,
    SketchedOrthonormal,
    SketchSelect(Strategy),
}

impl Method {
    /// Methods whose coefficients come from sketched inner products.
    pub fn is_sketched(self) -> bool {
        !matches!(self, Method::Full | Method::Truncated)
    }

    pub fn name(self) -> String {
        match self {
            Method::Full => "full".into(),
            Method::Truncated => "truncated".into(),
            Method::TruncatedSketchedCoeffs => "truncated-sketched".into(),
            Method::SketchedOrthonormal => "sketched-orthonormal".into(),
            Method::SketchSelect(s) => format!("ssa-{s}"),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Method::Full),
            "truncated" => Ok(Method::Truncated),
            "truncated-sketched" | "truncated_sketched_coeffs" => Ok(Method::TruncatedSketchedCoeffs),
            "sketched-orthonormal" | "sketched_orthonormal" => Ok(Method::SketchedOrthonormal),
            other => match other.strip_prefix("ssa-") {
                Some(strategy) => Ok(Method::SketchSelect(strategy.parse()?)),
                None => arg_err(format!("unknown method '{other}'")),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StopReason {
    MaxIterations,
    Breakdown,
    CondExceeded,
}

impl StopReason {
    pub fn name(self) -> &'static str {
        match self {
            StopReason::MaxIterations => "max_iterations",
            StopReason::Breakdown => "breakdown",
            StopReason::CondExceeded => "cond_exceeded",
        }
    }
}

impl fmt::Display for StopReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArnoldiConfig<T> {
    /// Maximum number of iterations (the basis then has `m_max + 1` columns).
    pub m_max: usize,
    /// Truncation / selection parameter.
    pub k: usize,
    /// Sketch dimension; must match the operator passed to the run.
    pub s: usize,
    pub cond_threshold: T,
    /// Measure `cond(V)` every this many iterations; 0 disables monitoring.
    pub cond_check_stride: usize,
    /// Relative breakdown tolerance.
    pub breakdown_tol: T,
    pub method: Method,
}

impl<T: Real> ArnoldiConfig<T> {
    pub const DEFAULT_COND_THRESHOLD: f64 = 1e12;
    pub const DEFAULT_COND_CHECK_STRIDE: usize = 5;
    pub const DEFAULT_BREAKDOWN_TOL: f64 = 1e-14;

    pub fn new(method: Method, m_max: usize, k: usize, s: usize) -> Self {
        Self {
            m_max,
            k,
            s,
            cond_threshold: T::lit(Self::DEFAULT_COND_THRESHOLD),
            cond_check_stride: Self::DEFAULT_COND_CHECK_STRIDE,
            breakdown_tol: T::lit(Self::DEFAULT_BREAKDOWN_TOL),
            method,
        }
    }

    pub fn with_cond_threshold(mut self, t: T) -> Self {
        self.cond_threshold = t;
        self
    }

    pub fn with_cond_check_stride(mut self, stride: usize) -> Self {
        self.cond_check_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return arg_err("k must be at least 1");
        }
        if self.m_max == 0 {
            return arg_err("m_max must be at least 1");
        }
        if self.cond_threshold.is_nan() || self.cond_threshold <= T::one() {
            return arg_err("cond_threshold must exceed 1");
        }
        if self.breakdown_tol.is_nan() || self.breakdown_tol < T::zero() {
            return arg_err("breakdown_tol must be non-negative");
        }
        if self.method.is_sketched() && self.s <= self.m_max {
            return arg_err(format!(
                "sketched methods need s > m_max (s={}, m_max={})",
                self.s, self.m_max
            ));
        }
        Ok(())
    }
}

/// Condition number of the basis measured after some iteration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CondSample<T> {
    /// Number of basis columns measured.
    pub dim: usize,
    /// Iterations completed when measured.
    pub iteration: usize,
    pub cond: T,
    pub sigma_min: T,
    pub sigma_max: T,
}

/// Basis, sketched basis, sketched images and coefficients of a run.
///
/// After `j` iterations without breakdown `v_basis` has `j + 1` columns. On
/// breakdown at iteration `j` the new vector is not appended, so `v_basis`
/// has `j` columns while `h` is still `(j + 1) × j` with a negligible last
/// subdiagonal entry.
#[derive(Debug, Clone)]
pub struct ArnoldiState<T> {
    pub v_basis: DenseMatrix<T>,
    /// `S V`, present for sketched methods.
    pub sv_basis: Option<DenseMatrix<T>>,
    /// `S A vᵢ` for `i < j`, present whenever a sketch was supplied.
    pub sav: Option<DenseMatrix<T>>,
    h_cols: Vec<Vec<T>>,
    h_support: Vec<Vec<usize>>,
    /// Completed iterations.
    pub j: usize,
}

impl<T: Real> ArnoldiState<T> {
    /// Dense `(j+1) × j` coefficient matrix.
    pub fn h(&self) -> DenseMatrix<T> {
        let j = self.j;
        let mut h = DenseMatrix::zeros(j + 1, j);
        for (c, col) in self.h_cols.iter().enumerate() {
            for (r, &v) in col.iter().enumerate() {
                h.set(r, c, v);
            }
        }
        h
    }

    /// Rows that may be nonzero in column `col` of `h` (ascending).
    pub fn h_support(&self, col: usize) -> &[usize] {
        &self.h_support[col]
    }

    pub fn h_col(&self, col: usize) -> &[T] {
        &self.h_cols[col]
    }
}

/// One projection step: coefficients `(row, h_ij)`, the projected vector and
/// (for sketched methods) its synchronized sketch.
#[derive(Debug, Clone)]
pub struct Projection<T> {
    pub coeffs: Vec<(usize, T)>,
    pub w_hat: Vec<T>,
    pub sw_hat: Option<Vec<T>>,
    /// `‖ŵ‖` or `‖Sŵ‖` depending on the method; becomes `h_{j+1,j}`.
    pub norm: T,
    /// `‖w‖` or `‖Sw‖`, used for the relative breakdown test.
    pub reference_norm: T,
}

impl<T: Real> Projection<T> {
    pub fn is_breakdown(&self, tol: T) -> bool {
        self.reference_norm == T::zero() || self.norm <= tol * self.reference_norm
    }
}

fn merge_coeffs<T: Real>(acc: &mut [T], extra: &[T]) {
    for (a, &e) in acc.iter_mut().zip(extra) {
        *a += e;
    }
}

fn dense_coeffs<T: Real>(lo: usize, hs: Vec<T>) -> Vec<(usize, T)> {
    hs.into_iter().enumerate().map(|(i, h)| (lo + i, h)).collect()
}

/// Modified Gram–Schmidt against every column of `v_basis`, with one extra
/// pass when the norm drops below `‖w‖/√2`.
pub fn full_arnoldi_step<T: Real>(v_basis: &DenseMatrix<T>, w: &[T]) -> Projection<T> {
    let reference_norm = norm2(w);
    let mut w_hat = w.to_vec();
    let mut hs = vec![T::zero(); v_basis.ncols()];
    let pass = |w_hat: &mut Vec<T>| -> Vec<T> {
        let mut add = vec![T::zero(); v_basis.ncols()];
        for (i, vi) in v_basis.cols().enumerate() {
            let h = dot(vi, w_hat);
            axpy(-h, vi, w_hat);
            add[i] = h;
        }
        add
    };
    let first = pass(&mut w_hat);
    merge_coeffs(&mut hs, &first);
    if norm2(&w_hat) < T::lit(REORTH_RATIO) * reference_norm {
        let second = pass(&mut w_hat);
        merge_coeffs(&mut hs, &second);
    }
    let norm = norm2(&w_hat);
    Projection { coeffs: dense_coeffs(0, hs), w_hat, sw_hat: None, norm, reference_norm }
}

/// Projects against the last `min(k, j)` columns (`j = v_basis.ncols()`).
///
/// Without `sketched` the coefficients are classical Gram–Schmidt inner
/// products `vᵢᵀ w` and `norm = ‖ŵ‖`. With `sketched = Some((SV, Sw))` they
/// are `(Svᵢ)ᵀ(Sw)`, `Sw` is updated alongside `w`, and `norm = ‖Sŵ‖`.
pub fn truncated_arnoldi_step<T: Real>(
    v_basis: &DenseMatrix<T>,
    w: &[T],
    k: usize,
    sketched: Option<(&DenseMatrix<T>, &[T])>,
) -> Projection<T> {
    let j = v_basis.ncols();
    let lo = j.saturating_sub(k);
    match sketched {
        None => {
            let hs: Vec<T> = (lo..j).map(|i| dot(v_basis.col(i), w)).collect();
            let mut w_hat = w.to_vec();
            for (i, &h) in (lo..j).zip(&hs) {
                axpy(-h, v_basis.col(i), &mut w_hat);
            }
            let norm = norm2(&w_hat);
            Projection { coeffs: dense_coeffs(lo, hs), w_hat, sw_hat: None, norm, reference_norm: norm2(w) }
        }
        Some((sv, sw)) => {
            let hs: Vec<T> = (lo..j).map(|i| dot(sv.col(i), sw)).collect();
            let coeffs = dense_coeffs(lo, hs);
            subtract_synchronized(v_basis, sv, w, sw, coeffs)
        }
    }
}

fn subtract_synchronized<T: Real>(
    v_basis: &DenseMatrix<T>,
    sv: &DenseMatrix<T>,
    w: &[T],
    sw: &[T],
    coeffs: Vec<(usize, T)>,
) -> Projection<T> {
    let mut w_hat = w.to_vec();
    let mut sw_hat = sw.to_vec();
    for &(i, h) in &coeffs {
        axpy(-h, v_basis.col(i), &mut w_hat);
        axpy(-h, sv.col(i), &mut sw_hat);
    }
    let norm = norm2(&sw_hat);
    Projection { coeffs, w_hat, sw_hat: Some(sw_hat), norm, reference_norm: norm2(sw) }
}

/// Sketched classical Gram–Schmidt against all columns, with one extra pass
/// when `‖Sŵ‖ < ‖Sw‖/√2`.
pub fn sketched_orthonormal_step<T: Real>(
    v_basis: &DenseMatrix<T>,
    sv: &DenseMatrix<T>,
    w: &[T],
    sw: &[T],
) -> Projection<T> {
    let j = v_basis.ncols();
    let first = truncated_arnoldi_step(v_basis, w, j, Some((sv, sw)));
    if first.norm >= T::lit(REORTH_RATIO) * first.reference_norm {
        return first;
    }
    let sw1 = first.sw_hat.as_deref().expect("sketched projection");
    let second = truncated_arnoldi_step(v_basis, &first.w_hat, j, Some((sv, sw1)));
    let mut hs: Vec<T> = first.coeffs.iter().map(|&(_, h)| h).collect();
    merge_coeffs(&mut hs, &second.coeffs.iter().map(|&(_, h)| h).collect::<Vec<_>>());
    Projection { coeffs: dense_coeffs(0, hs), reference_norm: first.reference_norm, ..second }
}

/// One sketch-and-select projection: choose `(I, h)` with `strategy` on
/// `(SV, Sw)`, then subtract the same combination from `w` and `Sw`.
pub fn sketch_select_step<T: Real>(
    v_basis: &DenseMatrix<T>,
    sv: &DenseMatrix<T>,
    sv_qr: Option<&QrUpdatable<T>>,
    w: &[T],
    sw: &[T],
    k: usize,
    strategy: Strategy,
) -> Result<Projection<T>> {
    let sel = select_with_factorization(strategy, sv, sv_qr, sw, k)?;
    let coeffs: Vec<(usize, T)> = sel.indices.into_iter().zip(sel.coeffs).collect();
    Ok(subtract_synchronized(v_basis, sv, w, sw, coeffs))
}

/// Step-by-step driver shared by [`arnoldi_run`] and the solvers.
pub struct ArnoldiProcess<'a, T: Real> {
    a: &'a CsrMatrix<T>,
    sketch: Option<&'a SketchOperator<T>>,
    cfg: ArnoldiConfig<T>,
    state: ArnoldiState<T>,
    sv_qr: Option<QrUpdatable<T>>,
    v_qr: Option<QrUpdatable<T>>,
    overcomplete: bool,
    stop: Option<StopReason>,
    cond_history: Vec<CondSample<T>>,
}

/// Everything a finished run produces.
#[derive(Debug, Clone)]
pub struct ArnoldiRun<T> {
    pub state: ArnoldiState<T>,
    pub stop_reason: StopReason,
    pub cond_history: Vec<CondSample<T>>,
}

impl<T: Real> ArnoldiRun<T> {
    /// Largest measured basis dimension whose condition number stayed at or
    /// below `threshold` (1 if no measurement qualifies: a single vector is
    /// perfectly conditioned).
    pub fn reached_dim(&self, threshold: T) -> usize {
        self.cond_history
            .iter()
            .filter(|c| c.cond <= threshold)
            .map(|c| c.dim)
            .max()
            .unwrap_or(1)
    }
}

impl<'a, T: Real> ArnoldiProcess<'a, T> {
    pub fn new(
        a: &'a CsrMatrix<T>,
        b: &[T],
        cfg: ArnoldiConfig<T>,
        sketch: Option<&'a SketchOperator<T>>,
    ) -> Result<Self> {
        cfg.validate()?;
        if !a.is_square() {
            return arg_err("matrix must be square");
        }
        let n = a.nrows();
        if b.len() != n {
            return arg_err(format!("b has length {}, expected {n}", b.len()));
        }
        let bnorm = norm2(b);
        if bnorm == T::zero() || !bnorm.is_finite() {
            return arg_err("starting vector must be nonzero and finite");
        }
        if cfg.method.is_sketched() && sketch.is_none() {
            return arg_err(format!("method {} needs a sketch operator", cfg.method));
        }
        if let Some(op) = sketch {
            if op.n() != n {
                return arg_err(format!("sketch acts on dimension {}, matrix has {n}", op.n()));
            }
            if cfg.method.is_sketched() && op.s() != cfg.s {
                return arg_err(format!("config s={} but sketch has s={}", cfg.s, op.s()));
            }
        }

        let mut v_basis = DenseMatrix::with_rows(n);
        let mut sv_basis = None;
        if cfg.method.is_sketched() {
            let op = sketch.expect("checked above");
            let sb = op.apply(b)?;
            let nsb = norm2(&sb);
            if nsb == T::zero() {
                return Err(Error::Construction("sketch annihilates the starting vector".into()));
            }
            let inv = T::one() / nsb;
            v_basis.push_col(&scaled(inv, b))?;
            let mut svb = DenseMatrix::with_rows(op.s());
            svb.push_col(&scaled(inv, &sb))?;
            sv_basis = Some(svb);
        } else {
            v_basis.push_col(&scaled(T::one() / bnorm, b))?;
        }

        let sv_qr = match (&cfg.method, &sv_basis) {
            (Method::SketchSelect(st), Some(svb)) if st.uses_full_least_squares() => {
                Some(QrUpdatable::from_matrix(svb)?)
            }
            _ => None,
        };
        let v_qr = if cfg.cond_check_stride > 0 { Some(QrUpdatable::from_matrix(&v_basis)?) } else { None };
        let sav = sketch.map(|op| DenseMatrix::with_rows(op.s()));
        let state =
            ArnoldiState { v_basis, sv_basis, sav, h_cols: Vec::new(), h_support: Vec::new(), j: 0 };
        Ok(Self { a, sketch, cfg, state, sv_qr, v_qr, overcomplete: false, stop: None, cond_history: Vec::new() })
    }

    pub fn state(&self) -> &ArnoldiState<T> {
        &self.state
    }

    pub fn config(&self) -> &ArnoldiConfig<T> {
        &self.cfg
    }

    pub fn stop_reason(&self) -> Option<StopReason> {
        self.stop
    }

    pub fn cond_history(&self) -> &[CondSample<T>] {
        &self.cond_history
    }

    /// Condition number of the current basis, or `None` when monitoring is off.
    pub fn measure_cond(&self) -> Option<CondSample<T>> {
        let qr = self.v_qr.as_ref()?;
        let dim = self.state.v_basis.ncols();
        if self.overcomplete {
            let inf = T::infinity();
            return Some(CondSample { dim, iteration: self.state.j, cond: inf, sigma_min: T::zero(), sigma_max: inf });
        }
        let s = singular_values_of_factor(qr);
        let (smax, smin) = (s[0], s[s.len() - 1]);
        let cond = if smin == T::zero() { T::infinity() } else { smax / smin };
        Some(CondSample { dim, iteration: self.state.j, cond, sigma_min: smin, sigma_max: smax })
    }

    fn project(&self, w: &[T], sw: Option<&[T]>) -> Result<Projection<T>> {
        let st = &self.state;
        let k = self.cfg.k;
        Ok(match self.cfg.method {
            Method::Full => full_arnoldi_step(&st.v_basis, w),
            Method::Truncated => truncated_arnoldi_step(&st.v_basis, w, k, None),
            Method::TruncatedSketchedCoeffs => {
                let sv = st.sv_basis.as_ref().expect("sketched method");
                truncated_arnoldi_step(&st.v_basis, w, k, Some((sv, sw.expect("sketched method"))))
            }
            Method::SketchedOrthonormal => {
                let sv = st.sv_basis.as_ref().expect("sketched method");
                sketched_orthonormal_step(&st.v_basis, sv, w, sw.expect("sketched method"))
            }
            Method::SketchSelect(strategy) => {
                let sv = st.sv_basis.as_ref().expect("sketched method");
                sketch_select_step(&st.v_basis, sv, self.sv_qr.as_ref(), w, sw.expect("sketched method"), k, strategy)?
            }
        })
    }

    fn record_cond(&mut self) -> Option<CondSample<T>> {
        let sample = self.measure_cond()?;
        self.cond_history.push(sample);
        Some(sample)
    }

    /// Runs one iteration. Returns the stop reason once the process has
    /// stopped; further calls are no-ops.
    pub fn step(&mut self) -> Result<Option<StopReason>> {
        if self.stop.is_some() {
            return Ok(self.stop);
        }
        let j = self.state.j;
        let n = self.a.nrows();
        let mut w = vec![T::zero(); n];
        self.a.spmv_into(self.state.v_basis.col(j), &mut w);
        let sw = match self.sketch {
            Some(op) => {
                let sw = op.apply(&w)?;
                self.state.sav.as_mut().expect("sav allocated with sketch").push_col(&sw)?;
                Some(sw)
            }
            None => None,
        };
        let proj = self.project(&w, sw.as_deref())?;

        let mut hcol = vec![T::zero(); j + 2];
        let mut support: Vec<usize> = Vec::with_capacity(proj.coeffs.len() + 1);
        for &(i, h) in &proj.coeffs {
            hcol[i] = h;
            support.push(i);
        }
        hcol[j + 1] = proj.norm;
        support.sort_unstable();
        support.push(j + 1);
        self.state.h_cols.push(hcol);
        self.state.h_support.push(support);
        self.state.j += 1;

        if proj.is_breakdown(self.cfg.breakdown_tol) {
            // V did not grow; measure only if this dimension has no sample yet.
            let dim = self.state.v_basis.ncols();
            if self.cond_history.last().is_none_or(|c| c.dim != dim) {
                self.record_cond();
            }
            self.stop = Some(StopReason::Breakdown);
            return Ok(self.stop);
        }

        let inv = T::one() / proj.norm;
        let v_new = scaled(inv, &proj.w_hat);
        self.state.v_basis.push_col(&v_new)?;
        if let (Some(svb), Some(sw_hat)) = (self.state.sv_basis.as_mut(), proj.sw_hat.as_ref()) {
            let sv_new = scaled(inv, sw_hat);
            if let Some(qr) = self.sv_qr.as_mut() {
                qr.append_column(&sv_new)?;
            }
            svb.push_col(&sv_new)?;
        }
        if let Some(qr) = self.v_qr.as_mut() {
            if qr.ncols() < qr.nrows() {
                qr.append_column(&v_new)?;
            } else {
                self.overcomplete = true;
            }
        }

        let stride = self.cfg.cond_check_stride;
        let at_end = self.state.j >= self.cfg.m_max;
        if stride > 0 && (self.state.j.is_multiple_of(stride) || at_end) {
            let sample = self.record_cond().expect("monitoring enabled");
            if !(sample.cond <= self.cfg.cond_threshold) {
                self.stop = Some(StopReason::CondExceeded);
                return Ok(self.stop);
            }
        }
        if at_end {
            self.stop = Some(StopReason::MaxIterations);
        }
        Ok(self.stop)
    }

    pub fn into_run(self) -> ArnoldiRun<T> {
        ArnoldiRun {
            state: self.state,
            stop_reason: self.stop.unwrap_or(StopReason::MaxIterations),
            cond_history: self.cond_history,
        }
    }
}

/// Builds a Krylov basis of `A` from `b` until `m_max`, breakdown, or the
/// monitored condition number exceeds the threshold.
pub fn arnoldi_run<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    cfg: ArnoldiConfig<T>,
    sketch: Option<&SketchOperator<T>>,
) -> Result<ArnoldiRun<T>> {
    let mut p = ArnoldiProcess::new(a, b, cfg, sketch)?;
    while p.step()?.is_none() {}
    Ok(p.into_run())
}
