use rayon::prelude::*;
use ssa_core::solvers::{self, gmres_with, SgmresOptions};
use ssa_core::SolveReport;

use super::{arnoldi_config, sketch_dim, sketch_for};
use crate::config::{ExperimentConfig, MethodKind};
use crate::output::{opt_real, real, Output, Table};
use crate::CliError;

/// Largest ratio of sGMRES to GMRES true residual over the checkpoints where
/// the sGMRES basis has cond below `cond_cap`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiOptimality {
    pub max_ratio: f64,
    pub checkpoints: usize,
}

pub fn quasi_optimality(reference: &SolveReport, sketched: &SolveReport, cond_cap: f64) -> QuasiOptimality {
    let mut q = QuasiOptimality { max_ratio: 0.0, checkpoints: 0 };
    for st in &sketched.steps {
        let (Some(r), Some(c)) = (st.true_resid, st.cond) else { continue };
        if c.is_nan() || c >= cond_cap {
            continue;
        }
        let Some(g) = reference.steps.iter().find(|g| g.j == st.j).and_then(|g| g.true_resid) else { continue };
        q.max_ratio = q.max_ratio.max(r / g);
        q.checkpoints += 1;
    }
    q
}

pub fn sgmres(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let problem = cfg.single_problem()?.resolve::<f64>(cfg.seed)?;
    let specs = cfg.method_specs()?;
    let s = sketch_dim(cfg, problem.n(), 2 * (cfg.m + 1))?;
    let sketch = sketch_for(cfg, &specs, problem.n(), s)?;
    if specs.iter().any(|m| matches!(m.kind, MethodKind::Arnoldi(_))) && sketch.is_none() {
        return Err(CliError::usage("sgmres methods must build a sketched basis (e.g. ssa-pinv)"));
    }
    if let Some(bad) = specs.iter().find(|m| m.m_max(cfg.m) == 0) {
        return Err(CliError::usage(format!("method '{bad}' leaves no iterations")));
    }
    let opts = SgmresOptions { tol: cfg.tol, true_resid_stride: cfg.resid_stride, ignore_cond: cfg.ignore_cond };

    let reports: Vec<_> = specs
        .par_iter()
        .map(|spec| match spec.kind {
            MethodKind::Gmres => gmres_with(&problem.a, &problem.b, spec.m_max(cfg.m), cfg.tol, cfg.resid_stride),
            MethodKind::Arnoldi(_) => solvers::sgmres(
                &problem.a,
                &problem.b,
                arnoldi_config(cfg, spec, s),
                sketch.as_ref().expect("sketch built for sketched methods"),
                opts,
            ),
        })
        .collect::<Result<_, _>>()?;

    let mut t = Table::new(cfg, &["method", "j", "sketched_resid", "true_resid", "cond"]);
    let mut notes = Vec::new();
    let reference = specs.iter().position(|m| m.kind == MethodKind::Gmres).map(|i| &reports[i]);
    for (spec, rep) in specs.iter().zip(&reports) {
        let name = spec.to_string();
        for st in &rep.steps {
            t.row(&[name.clone(), st.j.to_string(), real(st.sketched_resid), opt_real(st.true_resid), opt_real(st.cond)]);
        }
        notes.push(format!(
            "{name}: {} after {} iterations, true residual {}{}",
            rep.stop_reason,
            rep.iterations(),
            opt_real(rep.final_true_resid()),
            if rep.rank_deficient { " (rank-deficient least squares)" } else { "" }
        ));
        if let (Some(g), MethodKind::Arnoldi(_)) = (reference, spec.kind) {
            let q = quasi_optimality(g, rep, 1e8);
            if q.checkpoints > 0 {
                notes.push(format!(
                    "{name}: max true residual ratio to gmres {:.3} over {} checkpoints with cond < 1e8{}",
                    q.max_ratio,
                    q.checkpoints,
                    if q.max_ratio <= 6.0 { "" } else { " (above 6)" }
                ));
            }
        }
    }
    Ok(Output { main: t.into_string(), notes, ..Output::default() })
}
