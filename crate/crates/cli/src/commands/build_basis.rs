use rayon::prelude::*;
use super::{run_basis, sketch_dim, sketch_for};
use crate::config::ExperimentConfig;
use crate::output::{real, Output, Table};
use crate::CliError;

pub fn build_basis(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let problem = cfg.single_problem()?.resolve::<f64>(cfg.seed)?;
    let specs = cfg.method_specs()?;
    let s = sketch_dim(cfg, problem.n(), 2 * cfg.m)?;
    let sketch = sketch_for(cfg, &specs, problem.n(), s)?;

    let runs: Vec<_> = specs
        .par_iter()
        .map(|spec| run_basis(cfg, spec, &problem, s, sketch.as_ref()))
        .collect();

    let mut t = Table::new(cfg, &["method", "j", "cond", "sigma_min", "sigma_max", "stopped_reason"]);
    for (spec, run) in specs.iter().zip(runs) {
        let Some(run) = run? else { continue };
        let name = spec.to_string();
        for c in &run.cond_history {
            t.row(&[
                name.clone(),
                c.dim.to_string(),
                real(c.cond),
                real(c.sigma_min),
                real(c.sigma_max),
                run.stop_reason.name().to_string(),
            ]);
        }
    }
    Ok(Output { main: t.into_string(), ..Output::default() })
}
