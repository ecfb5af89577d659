mod common;

use common::*;
use proptest::prelude::*;
use ssa_core::arnoldi::{arnoldi_run, ArnoldiConfig, ArnoldiProcess, ArnoldiRun, Method, StopReason};
use ssa_core::linalg::vector::{dot, norm2, unit as e};
use ssa_core::linalg::{CsrMatrix, DenseMatrix};
use ssa_core::matrix_io::{conv_diff_2d, shift};
use ssa_core::sketch::SketchOperator;
use ssa_core::Strategy;

fn structural_residual(a: &CsrMatrix<f64>, run: &ArnoldiRun<f64>) -> f64 {
    let st = &run.state;
    let j = st.j;
    let cols = st.v_basis.ncols();
    let av = a.mul_dense(&st.v_basis.leading_cols(j)).unwrap();
    // On breakdown the last basis vector is missing; its coefficient is ~0.
    let h = st.h();
    let vh = if cols == j + 1 {
        st.v_basis.matmul(&h).unwrap()
    } else {
        let top = DenseMatrix::from_cols(j, &(0..j).map(|c| h.col(c)[..j].to_vec()).collect::<Vec<_>>()).unwrap();
        st.v_basis.matmul(&top).unwrap()
    };
    av.sub(&vh).unwrap().frobenius_norm()
}

fn orthogonality_gap(v: &DenseMatrix<f64>) -> f64 {
    v.gram().sub(&DenseMatrix::identity(v.ncols())).unwrap().frobenius_norm()
}

/// Textbook modified Gram–Schmidt Arnoldi with one conditional second pass,
/// written independently.
fn mgs_oracle(a: &DenseMatrix<f64>, b: &[f64], m: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let nb = norm2(b);
    let mut v = vec![b.iter().map(|x| x / nb).collect::<Vec<_>>()];
    let mut h = vec![vec![0.0; m]; m + 1];
    for j in 0..m {
        let mut w = a.matvec(&v[j]).unwrap();
        for i in 0..=j {
            h[i][j] = dot(&v[i], &w);
            for (wx, vx) in w.iter_mut().zip(&v[i]) {
                *wx -= h[i][j] * vx;
            }
        }
        if norm2(&w) < std::f64::consts::FRAC_1_SQRT_2 * norm2(&a.matvec(&v[j]).unwrap()) {
            for i in 0..=j {
                let c = dot(&v[i], &w);
                h[i][j] += c;
                for (wx, vx) in w.iter_mut().zip(&v[i]) {
                    *wx -= c * vx;
                }
            }
        }
        h[j + 1][j] = norm2(&w);
        v.push(w.iter().map(|x| x / h[j + 1][j]).collect());
    }
    (v, h)
}

#[test]
fn full_arnoldi_matches_mgs_oracle() {
    let a = random_sparse(40, 3, 1);
    let b = gaussian_vector(40, 2);
    let m = 8;
    let cfg = ArnoldiConfig::new(Method::Full, m, 1, 0);
    let run = arnoldi_run(&a, &b, cfg, None).unwrap();
    let (v, h) = mgs_oracle(&a.to_dense(), &b, m);
    assert_eq!(run.stop_reason, StopReason::MaxIterations);
    for (j, vj) in v.iter().enumerate() {
        assert!(max_abs_diff(run.state.v_basis.col(j), vj) < 1e-12, "v{j}");
    }
    let hh = run.state.h();
    for (i, row) in h.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            assert!((hh.get(i, j) - x).abs() < 1e-12, "h[{i},{j}]");
        }
    }
}

#[test]
fn full_arnoldi_orthonormal_and_structural() {
    let a = conv_diff_2d::<f64>(12, 40.0).unwrap();
    let b = gaussian_vector(144, 3);
    let run = arnoldi_run(&a, &b, ArnoldiConfig::new(Method::Full, 40, 1, 0), None).unwrap();
    assert!(orthogonality_gap(&run.state.v_basis) < 1e-12);
    assert!(structural_residual(&a, &run) < 1e-12 * a.frobenius_norm());
    for c in &run.cond_history {
        assert!((c.cond - 1.0).abs() < 1e-10);
    }
}

#[test]
fn diagonal_breaks_down_at_its_degree() {
    let d: Vec<(usize, usize, f64)> = (0..5).map(|i| (i, i, (i + 1) as f64)).collect();
    let a = CsrMatrix::from_triplets(5, 5, &d).unwrap();
    let run = arnoldi_run(&a, &[1.0; 5], ArnoldiConfig::new(Method::Full, 10, 1, 0), None).unwrap();
    assert_eq!(run.stop_reason, StopReason::Breakdown);
    assert_eq!(run.state.j, 5);
    assert_eq!(run.state.v_basis.ncols(), 5);
    assert!(run.state.h().get(5, 4).abs() < 1e-12);
    assert!(structural_residual(&a, &run) < 1e-12);
}

#[test]
fn identity_breaks_down_immediately() {
    let a = CsrMatrix::<f64>::identity(8);
    for m in [Method::Full, Method::Truncated] {
        let run = arnoldi_run(&a, &gaussian_vector(8, 0), ArnoldiConfig::new(m, 5, 2, 0), None).unwrap();
        assert_eq!(run.stop_reason, StopReason::Breakdown);
        assert_eq!(run.state.j, 1);
    }
}

#[test]
fn truncated_band_structure() {
    let a = random_sparse(60, 4, 5);
    let b = gaussian_vector(60, 6);
    let k = 3;
    let run = arnoldi_run(&a, &b, ArnoldiConfig::new(Method::Truncated, 20, k, 0), None).unwrap();
    let st = &run.state;
    for j in 0..st.j {
        let lo = (j + 1).saturating_sub(k);
        let want: Vec<usize> = (lo..=j + 1).collect();
        assert_eq!(st.h_support(j), &want[..]);
        let h = st.h_col(j);
        for (i, &x) in h.iter().enumerate() {
            if !want.contains(&i) {
                assert_eq!(x, 0.0);
            }
        }
    }
    for c in st.v_basis.cols() {
        assert!((norm2(c) - 1.0).abs() < 1e-13);
    }
    // Each new vector is orthogonal to the k vectors it was projected against.
    for j in 1..st.v_basis.ncols() {
        for i in j.saturating_sub(k)..j {
            assert!(dot(st.v_basis.col(i), st.v_basis.col(j)).abs() < 1e-12, "v{i}·v{j}");
        }
    }
    assert!(structural_residual(&a, &run) < 1e-12 * a.frobenius_norm());
}

#[test]
fn sketched_methods_normalize_in_sketch_space() {
    let n = 200;
    let a = gaussian_operator(n, 7);
    let b = gaussian_vector(n, 8);
    let s = 60;
    let sk = SketchOperator::srht(n, s, 11).unwrap();
    for method in [
        Method::TruncatedSketchedCoeffs,
        Method::SketchedOrthonormal,
        Method::SketchSelect(Strategy::Pinv),
        Method::SketchSelect(Strategy::Omp),
    ] {
        let run = arnoldi_run(&a, &b, ArnoldiConfig::new(method, 25, 3, s), Some(&sk)).unwrap();
        let st = &run.state;
        let sv = st.sv_basis.as_ref().unwrap();
        for c in sv.cols() {
            assert!((norm2(c) - 1.0).abs() < 1e-12, "{method}");
        }
        // The synchronized sketch stays consistent with S applied to V (when
        // projections do not cancel heavily; the gap grows like ‖w‖/‖ŵ‖).
        let direct = sk.apply_matrix(&st.v_basis).unwrap();
        assert!(direct.sub(sv).unwrap().frobenius_norm() < 1e-10 * direct.frobenius_norm(), "{method}");
        let sav = st.sav.as_ref().unwrap();
        let direct = sk.apply_matrix(&a.mul_dense(&st.v_basis.leading_cols(st.j)).unwrap()).unwrap();
        assert!(direct.sub(sav).unwrap().frobenius_norm() < 1e-12 * direct.frobenius_norm(), "{method}");
        assert!(structural_residual(&a, &run) < 1e-10 * a.frobenius_norm() * (st.j as f64), "{method}");
    }
}

#[test]
fn pinv_replay_from_stored_sketches() {
    let n = 64;
    let a = random_sparse(n, 3, 21);
    let b = gaussian_vector(n, 22);
    let (s, k) = (32, 3);
    let sk = SketchOperator::srht(n, s, 23).unwrap();
    let run = arnoldi_run(&a, &b, ArnoldiConfig::new(Method::SketchSelect(Strategy::Pinv), 15, k, s), Some(&sk)).unwrap();
    let st = &run.state;
    let sv = st.sv_basis.as_ref().unwrap();
    let sav = st.sav.as_ref().unwrap();
    for j in 0..st.j {
        let svj = sv.leading_cols(j + 1);
        let sw = sav.col(j);
        let full = ssa_core::linalg::least_squares(&svj, sw).unwrap();
        let mut order: Vec<usize> = (0..=j).collect();
        order.sort_by(|&p, &q| full[q].abs().partial_cmp(&full[p].abs()).unwrap().then(p.cmp(&q)));
        order.truncate(k);
        order.sort_unstable();
        let mut sw_hat = sw.to_vec();
        for &i in &order {
            for (x, y) in sw_hat.iter_mut().zip(sv.col(i)) {
                *x -= full[i] * y;
            }
        }
        let h = st.h_col(j);
        for i in 0..=j {
            let want = if order.contains(&i) { full[i] } else { 0.0 };
            assert!((h[i] - want).abs() < 1e-10 * (1.0 + want.abs()), "h[{i},{j}]");
        }
        assert!((h[j + 1] - norm2(&sw_hat)).abs() < 1e-10);
        assert_eq!(&st.h_support(j)[..order.len()], &order[..]);
    }
}

#[test]
fn pinv_with_k_equal_j_orthogonalizes_in_sketch_space() {
    let n = 128;
    let a = random_sparse(n, 3, 30);
    let sk = SketchOperator::srht(n, 40, 31).unwrap();
    let m = 12;
    let run = arnoldi_run(&a, &gaussian_vector(n, 32), ArnoldiConfig::new(Method::SketchSelect(Strategy::Pinv), m, m, 40), Some(&sk))
        .unwrap();
    let sv = run.state.sv_basis.as_ref().unwrap();
    for j in 1..sv.ncols() {
        let c = sv.leading_cols(j).tr_matvec(sv.col(j)).unwrap();
        assert!(norm2(&c) < 1e-10, "column {j}");
    }
}

#[test]
fn truncated_without_truncation_is_classical_gram_schmidt() {
    let n = 30;
    let a = gaussian_operator(n, 40);
    let b = gaussian_vector(n, 41);
    let m = 6;
    let run = arnoldi_run(&a, &b, ArnoldiConfig::new(Method::Truncated, m, m, 0), None).unwrap();
    let st = &run.state;
    for j in 0..m {
        let w = a.spmv(st.v_basis.col(j)).unwrap();
        for i in 0..=j {
            assert!((st.h_col(j)[i] - dot(st.v_basis.col(i), &w)).abs() < 1e-13);
        }
    }
    let full = arnoldi_run(&a, &b, ArnoldiConfig::new(Method::Full, m, 1, 0), None).unwrap();
    assert!(full.state.v_basis.sub(&st.v_basis).unwrap().frobenius_norm() < 1e-10);
}

#[test]
fn symmetric_k2_is_lanczos() {
    let a = ssa_core::matrix_io::tridiag_toeplitz::<f64>(200, 2.0, -1.0, -1.0).unwrap();
    let b = gaussian_vector(200, 3);
    let run = arnoldi_run(&a, &b, ArnoldiConfig::new(Method::Truncated, 12, 2, 0), None).unwrap();
    assert!(orthogonality_gap(&run.state.v_basis) < 1e-8);
    let full = arnoldi_run(&a, &b, ArnoldiConfig::new(Method::Full, 12, 1, 0), None).unwrap();
    assert!(full.state.v_basis.sub(&run.state.v_basis).unwrap().frobenius_norm() < 1e-8);
}

#[test]
fn k1_on_diagonal_follows_scalar_recurrence() {
    // With k = 1: h_jj = vⱼᵀ D vⱼ, ŵ = (D − h_jj) vⱼ, v_{j+1} = ŵ/‖ŵ‖.
    let d = [1.0, 2.0, 3.0, 4.0];
    let a = CsrMatrix::from_triplets(4, 4, &d.iter().enumerate().map(|(i, &x)| (i, i, x)).collect::<Vec<_>>()).unwrap();
    let run = arnoldi_run(&a, &[1.0; 4], ArnoldiConfig::new(Method::Truncated, 3, 1, 0), None).unwrap();
    let mut v: Vec<f64> = vec![0.5; 4];
    for j in 0..3 {
        let hjj: f64 = v.iter().zip(&d).map(|(x, di)| x * x * di).sum();
        let w: Vec<f64> = v.iter().zip(&d).map(|(x, di)| (di - hjj) * x).collect();
        let nw = norm2(&w);
        assert!((run.state.h_col(j)[j] - hjj).abs() < 1e-14);
        assert!((run.state.h_col(j)[j + 1] - nw).abs() < 1e-14);
        v = w.iter().map(|x| x / nw).collect();
        assert!(max_abs_diff(run.state.v_basis.col(j + 1), &v) < 1e-14);
    }
}

#[test]
fn sketched_orthonormal_gives_orthonormal_sketch() {
    let n = 300;
    let a = random_sparse(n, 3, 9);
    let b = gaussian_vector(n, 10);
    let s = 80;
    let sk = SketchOperator::srht(n, s, 3).unwrap();
    let run = arnoldi_run(&a, &b, ArnoldiConfig::new(Method::SketchedOrthonormal, 30, 1, s), Some(&sk)).unwrap();
    assert!(orthogonality_gap(run.state.sv_basis.as_ref().unwrap()) < 1e-10);
}

#[test]
fn sketch_select_support_at_most_k_plus_one() {
    let n = 256;
    let a = conv_diff_2d::<f64>(16, 200.0).unwrap();
    let b = gaussian_vector(n, 1);
    let sk = SketchOperator::srht(n, 60, 2).unwrap();
    for st in Strategy::HEURISTICS {
        let k = 3;
        let run = arnoldi_run(&a, &b, ArnoldiConfig::new(Method::SketchSelect(st), 20, k, 60), Some(&sk)).unwrap();
        for j in 0..run.state.j {
            let sup = run.state.h_support(j);
            assert!(sup.len() <= k + 1, "{st}");
            assert_eq!(*sup.last().unwrap(), j + 1);
        }
    }
}

#[test]
fn identity_sketch_with_full_selection_is_orthonormal() {
    for seed in 0..5 {
        let n = 50 + 20 * seed as usize;
        let a = random_sparse(n, 3, seed);
        let b = gaussian_vector(n, seed + 1);
        let m = 15;
        let sk = SketchOperator::identity(n).unwrap();
        let cfg = ArnoldiConfig::new(Method::SketchSelect(Strategy::Pinv), m, m, n);
        let run = arnoldi_run(&a, &b, cfg, Some(&sk)).unwrap();
        assert!(orthogonality_gap(&run.state.v_basis) < 1e-8);
        assert!(structural_residual(&a, &run) < 1e-10 * a.frobenius_norm());
    }
}

#[test]
fn shift_matrix_keeps_disjoint_supports() {
    let n = 64;
    let a = shift::<f64>(n).unwrap();
    let run = arnoldi_run(&a, &e(n, 0), ArnoldiConfig::new(Method::Truncated, n - 1, 2, 0).with_cond_check_stride(1), None)
        .unwrap();
    assert_eq!(run.stop_reason, StopReason::MaxIterations);
    for (j, c) in run.state.v_basis.cols().enumerate() {
        assert_eq!(c, &e::<f64>(n, j)[..]);
    }
    assert!(run.cond_history.iter().all(|c| (c.cond - 1.0).abs() <= 1e-12));
}

#[test]
fn cond_monitor_matches_direct_measurement_and_stops() {
    let a = conv_diff_2d::<f64>(20, 400.0).unwrap();
    let b = gaussian_vector(400, 4);
    let cfg = ArnoldiConfig::new(Method::Truncated, 120, 1, 0).with_cond_threshold(1e6).with_cond_check_stride(3);
    let run = arnoldi_run(&a, &b, cfg, None).unwrap();
    assert_eq!(run.stop_reason, StopReason::CondExceeded);
    let last = run.cond_history.last().unwrap();
    assert!(last.cond > 1e6);
    for c in &run.cond_history {
        assert_eq!(c.dim, c.iteration + 1);
        let want = na_cond(&run.state.v_basis.leading_cols(c.dim));
        assert!((c.cond - want).abs() < 1e-8 * want, "dim {}: {} vs {}", c.dim, c.cond, want);
    }
    let reached = run.reached_dim(1e6);
    assert!(reached < last.dim);
    assert!(na_cond(&run.state.v_basis.leading_cols(reached)) <= 1e6);
}

#[test]
fn stepper_matches_run() {
    let a = random_sparse(30, 2, 3);
    let b = gaussian_vector(30, 4);
    let sk = SketchOperator::srht(30, 20, 5).unwrap();
    let cfg = ArnoldiConfig::new(Method::SketchSelect(Strategy::Sp), 10, 2, 20);
    let mut p = ArnoldiProcess::new(&a, &b, cfg.clone(), Some(&sk)).unwrap();
    let mut steps = 0;
    while p.step().unwrap().is_none() {
        steps += 1;
        assert_eq!(p.state().j, steps);
    }
    assert_eq!(p.step().unwrap(), p.stop_reason());
    let run = arnoldi_run(&a, &b, cfg, Some(&sk)).unwrap();
    assert_eq!(p.into_run().state.v_basis, run.state.v_basis);
}

#[test]
fn sketched_config_checks() {
    let a = random_sparse(30, 2, 3);
    let b = gaussian_vector(30, 4);
    let sk = SketchOperator::srht(30, 20, 5).unwrap();
    // s in the config differs from the operator.
    assert!(arnoldi_run(&a, &b, ArnoldiConfig::new(Method::SketchSelect(Strategy::Pinv), 10, 2, 25), Some(&sk)).is_err());
    let other = SketchOperator::srht(31, 20, 5).unwrap();
    assert!(arnoldi_run(&a, &b, ArnoldiConfig::new(Method::SketchSelect(Strategy::Pinv), 10, 2, 20), Some(&other)).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn runs_are_deterministic(seed in any::<u64>(), k in 1usize..5) {
        let n = 64;
        let a = random_sparse(n, 3, seed);
        let b = gaussian_vector(n, seed);
        let sk = SketchOperator::srht(n, 30, seed).unwrap();
        let cfg = ArnoldiConfig::new(Method::SketchSelect(Strategy::Greedy), 12, k, 30);
        let r1 = arnoldi_run(&a, &b, cfg.clone(), Some(&sk)).unwrap();
        let r2 = arnoldi_run(&a, &b, cfg, Some(&sk)).unwrap();
        prop_assert_eq!(&r1.state.v_basis, &r2.state.v_basis);
        prop_assert_eq!(r1.state.h(), r2.state.h());
    }

    #[test]
    fn structural_identity_for_every_method(seed in any::<u64>(), k in 1usize..4, which in 0usize..6) {
        let n = 48;
        let a = random_sparse(n, 3, seed);
        let b = gaussian_vector(n, seed ^ 3);
        let s = 24;
        let sk = SketchOperator::srht(n, s, seed).unwrap();
        let method = [
            Method::Full,
            Method::Truncated,
            Method::TruncatedSketchedCoeffs,
            Method::SketchedOrthonormal,
            Method::SketchSelect(Strategy::Pinv2),
            Method::SketchSelect(Strategy::CorrPinv),
        ][which];
        let run = arnoldi_run(&a, &b, ArnoldiConfig::new(method, 12, k, s).with_cond_threshold(1e300), Some(&sk)).unwrap();
        let scale = a.frobenius_norm() * run.state.v_basis.frobenius_norm();
        prop_assert!(structural_residual(&a, &run) < 1e-12 * scale);
    }

    #[test]
    fn basis_spans_krylov_space(seed in any::<u64>()) {
        let n = 40;
        let a = random_sparse(n, 2, seed);
        let b = gaussian_vector(n, seed);
        let m = 6;
        let sk = SketchOperator::srht(n, 20, seed).unwrap();
        let run = arnoldi_run(&a, &b, ArnoldiConfig::new(Method::SketchSelect(Strategy::Omp), m, 2, 20), Some(&sk)).unwrap();
        let v = &run.state.v_basis;
        let mut kv = unit(&b);
        for _ in 0..=m {
            let y = ssa_core::linalg::least_squares(v, &kv).unwrap();
            let fit = v.matvec(&y).unwrap();
            prop_assert!(max_abs_diff(&fit, &kv) < 1e-8);
            kv = unit(&a.spmv(&kv).unwrap());
        }
    }
}
