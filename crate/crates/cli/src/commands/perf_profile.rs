use rayon::prelude::*;
use ssa_core::analysis::performance_profile;
use ssa_core::arnoldi::ArnoldiRun;
use ssa_core::matrix_io::Problem;

use super::{run_basis, sketch_dim, sketch_for};
use crate::config::ExperimentConfig;
use crate::output::{real, Output, Table};
use crate::CliError;

/// Largest measured dimension with cond at or below the threshold; 1 for a
/// run that never grew past its start vector.
fn reached(run: Option<&ArnoldiRun<f64>>, threshold: f64) -> usize {
    run.map_or(1, |r| r.reached_dim(threshold))
}

/// A run counts as failed when the basis never grows past the start vector
/// below the threshold.
fn metric(reached: usize) -> Option<f64> {
    (reached >= 2).then_some(reached as f64)
}

pub fn perf_profile(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let specs = cfg.method_specs()?;
    let problem_specs = cfg.problems();
    if problem_specs.is_empty() {
        return Err(CliError::usage("perf-profile needs at least one --matrix or --generate"));
    }
    let problems: Vec<Problem<f64>> =
        problem_specs.par_iter().map(|p| p.resolve(cfg.seed)).collect::<Result<_, _>>()?;
    let dims: Vec<usize> = problems.iter().map(|p| sketch_dim(cfg, p.n(), 2 * cfg.m)).collect::<Result<_, _>>()?;
    let sketches: Vec<_> = problems
        .iter()
        .zip(&dims)
        .map(|(p, &s)| sketch_for(cfg, &specs, p.n(), s))
        .collect::<Result<_, _>>()?;

    let jobs: Vec<(usize, usize)> = (0..problems.len()).flat_map(|p| (0..specs.len()).map(move |m| (p, m))).collect();
    let runs: Vec<Option<ArnoldiRun<f64>>> = jobs
        .par_iter()
        .map(|&(p, m)| run_basis(cfg, &specs[m], &problems[p], dims[p], sketches[p].as_ref()))
        .collect::<Result<_, _>>()?;

    let method_names: Vec<String> = specs.iter().map(|s| s.to_string()).collect();
    let problem_names: Vec<String> = problems.iter().map(|p| p.name.clone()).collect();
    let mut table = vec![vec![None; problems.len()]; specs.len()];
    let mut metrics = Table::new(cfg, &["problem", "method", "reached_dim", "stopped_reason", "iterations"]);
    for (&(p, m), run) in jobs.iter().zip(&runs) {
        let d = reached(run.as_ref(), cfg.cond_threshold);
        table[m][p] = metric(d);
        metrics.row(&[
            problem_names[p].clone(),
            method_names[m].clone(),
            d.to_string(),
            run.as_ref().map_or("max_iterations", |r| r.stop_reason.name()).to_string(),
            run.as_ref().map_or(0, |r| r.state.j).to_string(),
        ]);
    }
    let profile = performance_profile(&method_names, &problem_names, &table)?;

    let mut t = Table::new(cfg, &["method", "theta", "y"]);
    for (name, curve) in method_names.iter().zip(&profile.curves) {
        for &(theta, y) in curve {
            t.row(&[name.clone(), real(theta), real(y)]);
        }
    }
    let extra = match &cfg.metrics_out {
        Some(p) => vec![(p.clone(), metrics.into_string())],
        None => Vec::new(),
    };
    Ok(Output { main: t.into_string(), extra, notes: Vec::new() })
}
