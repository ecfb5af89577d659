use ssa_core::analysis::{cond_after_projection, loss_of_orthogonality, LossMetrics};
use ssa_core::selection::select;
use ssa_core::DenseMatrix;

use crate::config::ExperimentConfig;
use crate::output::{real, Output, Table};
use crate::CliError;

/// Unit-column 4×3 basis on which the selection criteria disagree.
pub fn counterexample_basis() -> DenseMatrix {
    let r = 1.0 / 5f64.sqrt();
    DenseMatrix::from_rows(&[
        vec![r, 0.0, 0.0],
        vec![2.0 * r, 2.0 * r, 0.0],
        vec![0.0, r, r],
        vec![0.0, 0.0, 2.0 * r],
    ])
    .expect("static shape")
}

/// The two vectors to be projected: the first separates the least-squares
/// and correlation rules from the condition-number objective, the second
/// separates them from the loss-of-orthogonality metrics.
pub const COUNTEREXAMPLE_RHS: [[f64; 4]; 2] = [[8.0, 8.0, 9.0, 7.0], [9.0, 9.0, 10.0, 10.0]];

fn one_based(idx: &[usize]) -> String {
    idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(";")
}

/// First minimizer of `f` over the columns.
fn argmin(n: usize, mut f: impl FnMut(usize) -> Result<f64, CliError>) -> Result<(usize, f64), CliError> {
    let mut best = (0, f64::INFINITY);
    for i in 0..n {
        let v = f(i)?;
        if v < best.1 {
            best = (i, v);
        }
    }
    Ok(best)
}

/// Every configured strategy on `(V, w)` with `k` columns, then (for
/// `k = 1`) the exhaustive single-column choices under the condition-number
/// and loss-of-orthogonality objectives. Indices are 1-based.
pub fn select_demo(cfg: &ExperimentConfig) -> Result<Output, CliError> {
    let v = counterexample_basis();
    let mut t = Table::new(cfg, &["w", "criterion", "selected", "objective"]);
    for w in COUNTEREXAMPLE_RHS {
        let w_name = w.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(";");
        let mut push = |criterion: &str, idx: &[usize], value: f64| {
            t.row(&[w_name.clone(), criterion.to_string(), one_based(idx), real(value)]);
        };
        for strategy in cfg.strategies() {
            let r = select(strategy, &v, &w, cfg.k.min(v.ncols()))?;
            push(strategy.name(), &r.indices, r.residual_norm(&v, &w));
        }
        if cfg.k != 1 {
            continue;
        }
        let (i, c) = argmin(v.ncols(), |i| Ok(cond_after_projection(&v, &w, i)?.0))?;
        push("cond", &[i], c);
        let (i, c) = argmin(v.ncols(), |i| Ok(cond_after_projection(&v, &w, i)?.1))?;
        push("cond-normalized", &[i], c);
        for (m, name) in LossMetrics::<f64>::NAMES.iter().enumerate() {
            let (i, c) = argmin(v.ncols(), |i| Ok(loss_of_orthogonality(&v, &w, i, true)?.as_array()[m]))?;
            push(name, &[i], c);
        }
    }
    Ok(Output { main: t.into_string(), ..Output::default() })
}
