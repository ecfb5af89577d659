//! GMRES and sketched GMRES.
//!
//! Both solvers drive an [`ArnoldiProcess`]. GMRES keeps the Hessenberg
//! least-squares problem triangular with Givens rotations. Sketched GMRES
//! minimizes `‖S(A V y − b)‖` by appending each new column of `S A V` to an
//! incremental Householder QR, so the sketched residual costs `O(s)` per
//! iteration. The iterate `x = V y` (and the true residual) is only formed
//! every `true_resid_stride` iterations and at the stop.
//!
//! Residuals are relative: sketched ones to `‖S b‖`, true ones to `‖b‖`.

use std::fmt;

use crate::arnoldi::{ArnoldiConfig, ArnoldiProcess, Method, StopReason};
use crate::error::{arg_err, Result};
use crate::linalg::vector::{norm2, sub};
use crate::linalg::{CsrMatrix, DenseMatrix, IncrementalLeastSquares};
use crate::scalar::Real;
use crate::sketch::SketchOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SolveStop {
    Converged,
    MaxIterations,
    Breakdown,
    CondExceeded,
}

impl From<StopReason> for SolveStop {
    fn from(r: StopReason) -> Self {
        match r {
            StopReason::MaxIterations => SolveStop::MaxIterations,
            StopReason::Breakdown => SolveStop::Breakdown,
            StopReason::CondExceeded => SolveStop::CondExceeded,
        }
    }
}

impl SolveStop {
    pub fn name(self) -> &'static str {
        match self {
            SolveStop::Converged => "converged",
            SolveStop::MaxIterations => "max_iterations",
            SolveStop::Breakdown => "breakdown",
            SolveStop::CondExceeded => "cond_exceeded",
        }
    }
}

impl fmt::Display for SolveStop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One iteration of a solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveStep<T> {
    /// Basis dimension used by the iterate (number of iterations done).
    pub j: usize,
    /// Relative least-squares residual the solver minimizes (sketched for
    /// sGMRES, exact for GMRES).
    pub sketched_resid: T,
    /// `‖b − A x‖ / ‖b‖`, at checkpoints only.
    pub true_resid: Option<T>,
    /// Condition number of the basis at checkpoints, when measured.
    pub cond: Option<T>,
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub steps: Vec<SolveStep<T>>,
    pub x: Vec<T>,
    pub stop_reason: SolveStop,
    /// The final least-squares solve fell back to the minimum-norm solution.
    pub rank_deficient: bool,
}

impl<T: Real> SolveReport<T> {
    pub fn iterations(&self) -> usize {
        self.steps.last().map_or(0, |s| s.j)
    }

    /// Last true residual (always recorded at the stop).
    pub fn final_true_resid(&self) -> Option<T> {
        self.steps.iter().rev().find_map(|s| s.true_resid)
    }

    /// Steps that carry a true residual.
    pub fn checkpoints(&self) -> impl Iterator<Item = &SolveStep<T>> {
        self.steps.iter().filter(|s| s.true_resid.is_some())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SgmresOptions<T> {
    /// Stop once the relative sketched residual is at or below this.
    pub tol: T,
    /// Form `x` and its true residual every this many iterations (0: only at
    /// the stop).
    pub true_resid_stride: usize,
    /// Keep iterating past the condition-number threshold (cond is still
    /// recorded at checkpoints).
    pub ignore_cond: bool,
}

impl<T: Real> Default for SgmresOptions<T> {
    fn default() -> Self {
        Self { tol: T::lit(1e-8), true_resid_stride: 10, ignore_cond: false }
    }
}

fn relative_true_resid<T: Real>(a: &CsrMatrix<T>, b: &[T], x: &[T], bnorm: T) -> T {
    let mut ax = vec![T::zero(); b.len()];
    a.spmv_into(x, &mut ax);
    norm2(&sub(b, &ax)) / bnorm
}

fn combine<T: Real>(v: &DenseMatrix<T>, y: &[T]) -> Vec<T> {
    let mut x = vec![T::zero(); v.nrows()];
    for (c, &yi) in v.cols().zip(y) {
        crate::linalg::vector::axpy(yi, c, &mut x);
    }
    x
}

fn is_checkpoint(j: usize, stride: usize) -> bool {
    stride > 0 && j.is_multiple_of(stride)
}

fn latest_cond<T: Real>(p: &ArnoldiProcess<'_, T>) -> Option<T> {
    let dim = p.state().v_basis.ncols();
    match p.cond_history().last() {
        Some(c) if c.dim == dim => Some(c.cond),
        _ => p.measure_cond().map(|c| c.cond),
    }
}

/// GMRES with a full-Arnoldi basis; true residuals every 10 iterations.
pub fn gmres<T: Real>(a: &CsrMatrix<T>, b: &[T], m_max: usize, tol: T) -> Result<SolveReport<T>> {
    gmres_with(a, b, m_max, tol, 10)
}

/// Givens rotation `(c, s)` with `[c s; −s c]ᵀ [f; g] = [r; 0]`.
fn givens<T: Real>(f: T, g: T) -> (T, T) {
    if g == T::zero() {
        return (T::one(), T::zero());
    }
    let r = f.hypot(g);
    (f / r, g / r)
}

pub fn gmres_with<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    m_max: usize,
    tol: T,
    true_resid_stride: usize,
) -> Result<SolveReport<T>> {
    let bnorm = norm2(b);
    if bnorm == T::zero() {
        return arg_err("right-hand side must be nonzero");
    }
    let cfg = ArnoldiConfig::new(Method::Full, m_max, 1, 0)
        .with_cond_threshold(T::infinity())
        .with_cond_check_stride(true_resid_stride);
    let mut p = ArnoldiProcess::new(a, b, cfg, None)?;

    let mut rots: Vec<(T, T)> = Vec::new();
    let mut r_cols: Vec<Vec<T>> = Vec::new();
    let mut g = vec![bnorm];
    let mut steps = Vec::new();

    let solve_y = |r_cols: &[Vec<T>], g: &[T]| -> Vec<T> {
        let n = r_cols.len();
        let mut y = g[..n].to_vec();
        for i in (0..n).rev() {
            let mut acc = y[i];
            for (jj, col) in r_cols.iter().enumerate().skip(i + 1) {
                acc -= col[i] * y[jj];
            }
            let d = r_cols[i][i];
            y[i] = if d == T::zero() { T::zero() } else { acc / d };
        }
        y
    };

    loop {
        let stop = p.step()?;
        let j = p.state().j;
        let mut h = p.state().h_col(j - 1).to_vec();
        for (i, &(c, s)) in rots.iter().enumerate() {
            let (a0, a1) = (h[i], h[i + 1]);
            h[i] = c * a0 + s * a1;
            h[i + 1] = -s * a0 + c * a1;
        }
        let (c, s) = givens(h[j - 1], h[j]);
        h[j - 1] = c * h[j - 1] + s * h[j];
        h.truncate(j);
        rots.push((c, s));
        r_cols.push(h);
        let gj = g[j - 1];
        g[j - 1] = c * gj;
        g.push(-s * gj);
        let resid = g[j].abs() / bnorm;

        let converged = resid <= tol;
        let finished = converged || stop.is_some();
        let mut step = SolveStep { j, sketched_resid: resid, true_resid: None, cond: None };
        if finished || is_checkpoint(j, true_resid_stride) {
            let y = solve_y(&r_cols, &g);
            let v = p.state().v_basis.leading_cols(j);
            let x = combine(&v, &y);
            step.true_resid = Some(relative_true_resid(a, b, &x, bnorm));
            step.cond = latest_cond(&p);
            steps.push(step);
            if finished {
                let stop_reason = if converged { SolveStop::Converged } else { stop.expect("finished").into() };
                return Ok(SolveReport { steps, x, stop_reason, rank_deficient: false });
            }
        } else {
            steps.push(step);
        }
    }
}

/// Sketched GMRES over the basis built by `cfg.method`.
///
/// `sketch` must map `Rⁿ → Rˢ` with `s > cfg.m_max`. The method may be any
/// constructor, sketched or not; `S A vⱼ` is always taken from the process.
pub fn sgmres<T: Real>(
    a: &CsrMatrix<T>,
    b: &[T],
    cfg: ArnoldiConfig<T>,
    sketch: &SketchOperator<T>,
    opts: SgmresOptions<T>,
) -> Result<SolveReport<T>> {
    if sketch.s() <= cfg.m_max {
        return arg_err(format!("sketch dimension {} must exceed m_max {}", sketch.s(), cfg.m_max));
    }
    let bnorm = norm2(b);
    if bnorm == T::zero() {
        return arg_err("right-hand side must be nonzero");
    }
    let mut cfg = cfg;
    if opts.ignore_cond {
        cfg.cond_threshold = T::infinity();
    }
    let sb = sketch.apply(b)?;
    let sbnorm = norm2(&sb);
    if sbnorm == T::zero() {
        return arg_err("sketch annihilates the right-hand side");
    }
    let mut p = ArnoldiProcess::new(a, b, cfg, Some(sketch))?;
    let mut ls = IncrementalLeastSquares::new(&sb);
    let mut steps = Vec::new();

    loop {
        let stop = p.step()?;
        let j = p.state().j;
        let sav = p.state().sav.as_ref().expect("sketch supplied");
        ls.push_column(sav.col(j - 1))?;
        let resid = ls.residual_norm() / sbnorm;

        let converged = resid <= opts.tol;
        let finished = converged || stop.is_some();
        let mut step = SolveStep { j, sketched_resid: resid, true_resid: None, cond: None };
        if finished || is_checkpoint(j, opts.true_resid_stride) {
            let sol = ls.solve();
            let v = p.state().v_basis.leading_cols(j.min(p.state().v_basis.ncols()));
            let x = combine(&v, &sol.x);
            step.true_resid = Some(relative_true_resid(a, b, &x, bnorm));
            step.cond = latest_cond(&p);
            steps.push(step);
            if finished {
                let stop_reason = if converged { SolveStop::Converged } else { stop.expect("finished").into() };
                return Ok(SolveReport { steps, x, stop_reason, rank_deficient: sol.rank_deficient });
            }
        } else {
            steps.push(step);
        }
    }
}
