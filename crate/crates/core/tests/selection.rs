mod common;

use common::*;
use proptest::prelude::*;
use proptest::strategy::Strategy as PropStrategy;
use ssa_core::analysis::{cond_after_projection, loss_of_orthogonality};
use ssa_core::linalg::{least_squares, QrUpdatable};
use ssa_core::selection::{
    bruteforce_by, select, select_with_factorization, top_k_by_modulus, Strategy, BRUTEFORCE_MAX_SUBSETS,
};

const W1: [f64; 4] = [8.0, 8.0, 9.0, 7.0];
const W2: [f64; 4] = [9.0, 9.0, 10.0, 10.0];

#[test]
fn fixture_full_solution_values() {
    // V⁺w and Vᵀw worked out by hand on the 4×3 basis.
    let v = fixture_basis();
    let r5 = 5f64.sqrt();
    let h = least_squares(&v, &W1).unwrap();
    let sol = [21.0 / r5, 3.75 / r5, 22.25 / r5];
    assert!(max_abs_diff(&h, &sol) < 1e-12, "{h:?}");
    let c = v.tr_matvec(&W1).unwrap();
    assert!(max_abs_diff(&c, &[24.0 / r5, 25.0 / r5, 23.0 / r5]) < 1e-12);
}

#[test]
fn fixture_pinv_picks_third_column() {
    let v = fixture_basis();
    let r = select(Strategy::Pinv, &v, &W1, 1).unwrap();
    assert_eq!(r.indices, vec![2]);
    assert!((r.coeffs[0] - 22.25 / 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn fixture_corr_picks_second_column() {
    let v = fixture_basis();
    let r = select(Strategy::Corr, &v, &W1, 1).unwrap();
    assert_eq!(r.indices, vec![1]);
    assert!((r.coeffs[0] - 25.0 / 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn fixture_pinv2_and_corr_pinv_refit() {
    let v = fixture_basis();
    let r = select(Strategy::Pinv2, &v, &W1, 1).unwrap();
    assert_eq!(r.indices, vec![2]);
    assert!((r.coeffs[0] - 23.0 / 5f64.sqrt()).abs() < 1e-12);
    let r = select(Strategy::CorrPinv, &v, &W1, 1).unwrap();
    assert_eq!(r.indices, vec![1]);
    assert!((r.coeffs[0] - 25.0 / 5f64.sqrt()).abs() < 1e-12);
}

#[test]
fn fixture_cond_objective_picks_first_column() {
    let v = fixture_basis();
    for normalized in [false, true] {
        let best = bruteforce_by::<f64, _>(3, 1, |idx| {
            let (cu, cn) = cond_after_projection(&v, &W1, idx[0])?;
            Ok(if normalized { cn } else { cu })
        })
        .unwrap();
        assert_eq!(best, vec![0], "normalized={normalized}");
    }
}

#[test]
fn fixture_second_vector_both_rules_pick_third() {
    let v = fixture_basis();
    assert_eq!(select(Strategy::Pinv, &v, &W2, 1).unwrap().indices, vec![2]);
    assert_eq!(select(Strategy::Corr, &v, &W2, 1).unwrap().indices, vec![2]);
}

#[test]
fn fixture_loss_metrics_pick_second_column() {
    let v = fixture_basis();
    for m in 0..4 {
        let best = bruteforce_by::<f64, _>(3, 1, |idx| Ok(loss_of_orthogonality(&v, &W2, idx[0], true)?.as_array()[m]))
            .unwrap();
        assert_eq!(best, vec![1], "metric {m}");
    }
}

#[test]
fn top_k_ties_go_to_lowest_index() {
    assert_eq!(top_k_by_modulus(&[1.0, -3.0, 3.0, 2.0], 1), vec![1]);
    assert_eq!(top_k_by_modulus(&[1.0, 1.0, 1.0], 2), vec![0, 1]);
    assert_eq!(top_k_by_modulus(&[0.5, 2.0], 5), vec![0, 1]);
}

#[test]
fn k_at_least_j_selects_everything() {
    let v = gaussian_matrix(10, 3, 1);
    let w = gaussian_vector(10, 2);
    let full = least_squares(&v, &w).unwrap();
    for s in Strategy::ALL {
        let r = select(s, &v, &w, 5).unwrap();
        assert_eq!(r.indices, vec![0, 1, 2], "{s}");
        if s.uses_full_least_squares() || matches!(s, Strategy::Omp | Strategy::Sp | Strategy::Greedy | Strategy::BruteForce | Strategy::CorrPinv) {
            assert!(max_abs_diff(&r.coeffs, &full) < 1e-11, "{s}");
        }
    }
}

#[test]
fn factorization_reuse_matches_fresh_solve() {
    let v = gaussian_matrix(20, 6, 3);
    let w = gaussian_vector(20, 4);
    let qr = QrUpdatable::from_matrix(&v).unwrap();
    for s in [Strategy::Pinv, Strategy::Pinv2] {
        let a = select(s, &v, &w, 2).unwrap();
        let b = select_with_factorization(s, &v, Some(&qr), &w, 2).unwrap();
        assert_eq!(a.indices, b.indices);
        assert!(max_abs_diff(&a.coeffs, &b.coeffs) < 1e-12);
    }
}

#[test]
fn bad_inputs_rejected() {
    let v = gaussian_matrix(5, 2, 0);
    assert!(select(Strategy::Pinv, &v, &[1.0; 4], 1).is_err());
    assert!(select(Strategy::Pinv, &v, &[1.0; 5], 0).is_err());
    assert!(bruteforce_by::<f64, _>(60, 30, |_| Ok(0.0)).is_err());
    assert_eq!(BRUTEFORCE_MAX_SUBSETS, 1_000_000);
}

#[test]
fn greedy_handles_duplicate_columns() {
    let c = gaussian_vector(8, 1);
    let v = ssa_core::linalg::DenseMatrix::from_cols(8, &[c.clone(), c.clone(), gaussian_vector(8, 2)]).unwrap();
    let r = select(Strategy::Greedy, &v, &c, 2).unwrap();
    assert_eq!(r.indices.len(), 2);
    assert!(r.residual_norm(&v, &c) < 1e-12);
}

fn instance() -> impl PropStrategy<Value = (usize, usize, usize, u64)> {
    (1usize..=16, 1usize..=4, any::<u64>()).prop_flat_map(|(j, k, seed)| ((j + 1)..=(j + 12), Just(j), Just(k), Just(seed)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bruteforce_dominates_heuristics((rows, j, k, seed) in instance()) {
        let v = gaussian_matrix(rows, j, seed);
        let w = gaussian_vector(rows, seed ^ 7);
        let best = select(Strategy::BruteForce, &v, &w, k).unwrap().residual_norm(&v, &w);
        for s in Strategy::HEURISTICS {
            let r = select(s, &v, &w, k).unwrap();
            prop_assert_eq!(r.indices.len(), k.min(j));
            prop_assert!(r.indices.windows(2).all(|p| p[0] < p[1]));
            prop_assert!(best <= r.residual_norm(&v, &w) * (1.0 + 1e-12) + 1e-12, "{} beat brute force", s);
        }
    }

    #[test]
    fn strategies_coincide_on_orthonormal((rows, j, k, seed) in instance()) {
        let q = QrUpdatable::from_matrix(&gaussian_matrix(rows, j, seed)).unwrap().thin_q();
        let w = gaussian_vector(rows, seed ^ 9);
        let reference = select(Strategy::BruteForce, &q, &w, k).unwrap();
        for s in Strategy::HEURISTICS {
            let r = select(s, &q, &w, k).unwrap();
            prop_assert_eq!(&r.indices, &reference.indices, "{}", s);
            prop_assert!(max_abs_diff(&r.coeffs, &reference.coeffs) < 1e-10, "{}", s);
        }
    }
}
