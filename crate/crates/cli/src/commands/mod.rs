mod bounds_demo;
mod build_basis;
mod perf_profile;
mod select_demo;
mod sgmres;

pub use bounds_demo::{bounds_demo, decay_path};
pub use build_basis::build_basis;
pub use perf_profile::perf_profile;
pub use select_demo::{counterexample_basis, select_demo, COUNTEREXAMPLE_RHS};
pub use sgmres::{quasi_optimality, sgmres, QuasiOptimality};

use ssa_core::arnoldi::{arnoldi_run, ArnoldiRun};
use ssa_core::matrix_io::Problem;
use ssa_core::sketch::SketchOperator;
use ssa_core::{ArnoldiConfig, SketchKind};

use crate::config::{ExperimentConfig, MethodKind, MethodSpec};
use crate::CliError;

/// Sketch dimension for a problem of size `n`: identity sketches use `n`,
/// otherwise `--s` or the command default.
fn sketch_dim(cfg: &ExperimentConfig, n: usize, default: usize) -> Result<usize, CliError> {
    if cfg.sketch_kind() == SketchKind::Identity {
        return match cfg.s {
            Some(s) if s != n => Err(CliError::usage(format!("identity sketch needs s = n = {n} (got {s})"))),
            _ => Ok(n),
        };
    }
    Ok(cfg.s.unwrap_or(default))
}

/// One sketch per problem, shared by all methods; `None` when no method
/// needs it.
fn sketch_for(
    cfg: &ExperimentConfig,
    specs: &[MethodSpec],
    n: usize,
    s: usize,
) -> Result<Option<SketchOperator<f64>>, CliError> {
    if !specs.iter().any(|m| m.is_sketched()) {
        return Ok(None);
    }
    Ok(Some(SketchOperator::new(cfg.sketch_kind(), n, s, cfg.seed)?))
}

fn arnoldi_config(cfg: &ExperimentConfig, spec: &MethodSpec, s: usize) -> ArnoldiConfig {
    let MethodKind::Arnoldi(method) = spec.kind else {
        unreachable!("gmres has no basis configuration")
    };
    ArnoldiConfig::new(method, spec.m_max(cfg.m), cfg.k, if method.is_sketched() { s } else { 0 })
        .with_cond_threshold(cfg.cond_threshold)
        .with_cond_check_stride(cfg.cond_check_stride)
}

/// Basis construction for one method; `None` when its cap leaves no
/// iterations (the basis is just the normalized start vector).
fn run_basis(
    cfg: &ExperimentConfig,
    spec: &MethodSpec,
    problem: &Problem<f64>,
    s: usize,
    sketch: Option<&SketchOperator<f64>>,
) -> Result<Option<ArnoldiRun<f64>>, CliError> {
    if spec.m_max(cfg.m) == 0 {
        return Ok(None);
    }
    Ok(Some(arnoldi_run(&problem.a, &problem.b, arnoldi_config(cfg, spec, s), sketch)?))
}
