use std::path::{Path, PathBuf};

use rand::Rng;
use rayon::prelude::*;
use ssa_core::analysis::{adversarial_next_vector, bound_report, decay_bound, decay_recurrence};
use ssa_core::linalg::vector::{axpy, norm2, scale};
use ssa_core::linalg::{singular_values, DenseMatrix, QrUpdatable};
use ssa_core::{rng, BoundReport};

use crate::config::ExperimentConfig;
use crate::output::{real, Output, Table};
use crate::CliError;

const HEADER: [&str; 13] = [
    "trial",
    "kind",
    "ncols",
    "sigma_min_v",
    "sigma_max_v",
    "alpha",
    "eta",
    "lower_bound_sigma_min_sq",
    "measured_sigma_min_sq",
    "upper_bound_cond_sq",
    "attainable_lower_cond_sq",
    "measured_cond_sq",
    "gap_factor",
];

/// `<out stem>.decay.csv` next to `out`.
pub fn decay_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "out".into());
    out.with_file_name(format!("{stem}.decay.csv"))
}

fn normalized(mut x: Vec<f64>) -> Vec<f64> {
    let n = norm2(&x);
    scale(1.0 / n, &mut x);
    x
}

/// A random unit-column basis with correlated columns, and a unit vector
/// whose projection has norm `frac · σ_min(V)`.
fn trial_pair(rows: usize, max_cols: usize, seed: u64, trial: usize) -> Result<(DenseMatrix<f64>, Vec<f64>), CliError> {
    let mut g = rng::seeded(seed.wrapping_add((trial as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15)), rng::stream::TRIALS);
    let cols = g.random_range(1..=max_cols.min(rows - 1));
    let base: Vec<f64> = rng::normal_vec(&mut g, rows);
    let mix: f64 = g.random_range(0.0..3.0);
    let mut v = DenseMatrix::with_rows(rows);
    for _ in 0..cols {
        let mut c: Vec<f64> = rng::normal_vec(&mut g, rows);
        axpy(mix, &base, &mut c);
        v.push_col(&normalized(c))?;
    }
    let smin = *singular_values(&v)?.last().expect("nonempty basis");
    let inside = normalized(v.matvec(&rng::normal_vec(&mut g, cols))?);
    // Random direction orthogonal to range(V): Q [0; (Qᵀg)₂].
    let q = QrUpdatable::from_matrix(&v)?;
    let mut z = q.qt_mul(&rng::normal_vec(&mut g, rows))?;
    z[..cols].iter_mut().for_each(|x| *x = 0.0);
    let outside = q.q_mul(&z)?;
    let outside = normalized(outside);
    let frac: f64 = g.random_range(0.0..1.0);
    let reach = norm2(&v.tr_matvec(&inside)?);
    let c = (frac * smin / reach).min(1.0);
    let s = (1.0 - c * c).sqrt();
    let w: Vec<f64> = inside.iter().zip(&outside).map(|(a, b)| c * a + s * b).collect();
    Ok((v, w))
}

fn row(t: &mut Table, trial: usize, kind: &str, ncols: usize, r: &BoundReport) {
    t.row(&[
        trial.to_string(),
        kind.to_string(),
        ncols.to_string(),
        real(r.sigma_min_v),
        real(r.sigma_max_v),
        real(r.alpha),
        real(r.eta),
        real(r.lower_bound_sigma_min_sq),
        real(r.measured_sigma_min_sq),
        real(r.upper_bound_cond_sq),
        real(r.attainable_lower_cond_sq),
        real(r.measured_cond_sq),
        real(r.gap_factor()),
    ]);
}

/// Per-trial bound reports for a random vector and for the adversarial
/// vector with the same `α`, plus the worst-case decay series
/// `α_m = x_m / 2` from `x_0 = 1/√2`.
pub fn bounds_demo(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    if cfg.rows < 2 {
        return Err(CliError::usage("bounds-demo needs at least 2 rows"));
    }
    let reports: Vec<_> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| -> Result<_, CliError> {
            let (v, w) = trial_pair(cfg.rows, cfg.m, cfg.seed, trial)?;
            let random = bound_report(&v, &w)?;
            let adv = adversarial_next_vector(&v, random.alpha)?;
            Ok((v.ncols(), random, bound_report(&v, &adv)?))
        })
        .collect::<Result<_, _>>()?;
    let mut t = Table::new(cfg, &HEADER);
    for (trial, (ncols, random, adv)) in reports.iter().enumerate() {
        row(&mut t, trial, "random", *ncols, random);
        row(&mut t, trial, "adversarial", *ncols, adv);
    }

    let x0 = 0.5f64.sqrt();
    let xs = decay_recurrence(x0, 0, cfg.decay_steps, |x| x / 2.0)?;
    let mut d = Table::new(cfg, &["step", "x", "envelope"]);
    for (step, x) in xs.into_iter().enumerate() {
        d.row(&[step.to_string(), real(x), real(decay_bound(x0, step))]);
    }

    let mut main = t.into_string();
    let mut extra = Vec::new();
    match (&cfg.decay_out, &cfg.out) {
        (Some(p), _) => extra.push((p.clone(), d.into_string())),
        (None, Some(out)) => extra.push((decay_path(out), d.into_string())),
        (None, None) => {
            main.push('\n');
            main.push_str(&d.into_string());
        }
    }
    Ok(Output { main, extra, notes: Vec::new() })
}
