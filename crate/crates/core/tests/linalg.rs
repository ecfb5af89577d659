mod common;

use common::*;
use proptest::prelude::*;
use ssa_core::linalg::vector::{dot, norm2};
use ssa_core::linalg::{
    cond2, cond_profile, least_squares, singular_values, svd, CsrMatrix, DenseMatrix, IncrementalLeastSquares,
    QrUpdatable,
};

#[test]
fn singular_values_match_nalgebra() {
    for (seed, (r, c)) in [(3, 3), (10, 4), (40, 12), (5, 9), (64, 30)].into_iter().enumerate() {
        let m = gaussian_matrix(r, c, seed as u64);
        let ours = singular_values(&m).unwrap();
        let theirs = na_singular_values(&m);
        assert!(max_abs_diff(&ours, &theirs) < 1e-12 * theirs[0], "{r}x{c}");
    }
}

#[test]
fn graded_columns_keep_relative_accuracy() {
    let mut m = gaussian_matrix(30, 6, 9);
    for j in 0..6 {
        let s = 10f64.powi(-2 * j as i32);
        for x in m.col_mut(j) {
            *x *= s;
        }
    }
    let ours = singular_values(&m).unwrap();
    let theirs = na_singular_values(&m);
    for (a, b) in ours.iter().zip(&theirs) {
        assert!((a - b).abs() <= 1e-9 * b, "{a} vs {b}");
    }
}

#[test]
fn svd_factors_are_orthonormal() {
    let m = gaussian_matrix(20, 7, 1);
    let d = svd(&m).unwrap();
    let utu = d.u.gram();
    let vtv = d.v.gram();
    let i = DenseMatrix::identity(7);
    assert!(utu.sub(&i).unwrap().frobenius_norm() < 1e-13);
    assert!(vtv.sub(&i).unwrap().frobenius_norm() < 1e-13);
}

#[test]
fn cond_profile_matches_prefix_conds() {
    let m = gaussian_matrix(25, 8, 4);
    let prof = cond_profile(&m).unwrap();
    for j in 1..=8 {
        let want = na_cond(&m.leading_cols(j));
        assert!((prof[j - 1] - want).abs() < 1e-10 * want);
    }
}

#[test]
fn cond2_scale_invariant() {
    let m = gaussian_matrix(12, 5, 2);
    let c = cond2(&m);
    assert!((cond2(&m.scaled(1e6)) - c).abs() < 1e-11 * c);
    assert!((cond2(&m.scaled(-3e-7)) - c).abs() < 1e-11 * c);
}

#[test]
fn least_squares_matches_normal_equations() {
    let m = gaussian_matrix(30, 5, 5);
    let b = gaussian_vector(30, 6);
    let x = least_squares(&m, &b).unwrap();
    let r: Vec<f64> = m.matvec(&x).unwrap().iter().zip(&b).map(|(a, b)| b - a).collect();
    // Residual is orthogonal to the column space.
    let g = m.tr_matvec(&r).unwrap();
    assert!(norm2(&g) < 1e-12 * norm2(&b));
    let na = to_na(&m).svd(true, true).solve(&nalgebra::DVector::from_vec(b.clone()), 1e-14).unwrap();
    assert!(max_abs_diff(&x, na.as_slice()) < 1e-12);
}

#[test]
fn incremental_least_squares_residual_tracks() {
    let m = gaussian_matrix(20, 6, 7);
    let b = gaussian_vector(20, 8);
    let mut ls = IncrementalLeastSquares::new(&b);
    for j in 0..6 {
        ls.push_column(m.col(j)).unwrap();
        let direct = least_squares(&m.leading_cols(j + 1), &b).unwrap();
        let sol = ls.solve();
        assert!(!sol.rank_deficient);
        assert!(max_abs_diff(&sol.x, &direct) < 1e-11);
        let r: Vec<f64> =
            m.leading_cols(j + 1).matvec(&direct).unwrap().iter().zip(&b).map(|(a, b)| b - a).collect();
        assert!((ls.residual_norm() - norm2(&r)).abs() < 1e-12);
    }
}

#[test]
fn qr_flags_rank_deficiency() {
    let c = gaussian_vector(10, 1);
    let m = DenseMatrix::from_cols(10, &[c.clone(), c.iter().map(|x| 2.0 * x).collect()]).unwrap();
    let qr = QrUpdatable::from_matrix(&m).unwrap();
    let sol = qr.solve(&c).unwrap();
    assert!(sol.rank_deficient);
    // Minimum-norm split of the coefficient: y ∝ (1, 2), with y1 + 2 y2 = 1.
    assert!((sol.x[0] - 0.2).abs() < 1e-10 && (sol.x[1] - 0.4).abs() < 1e-10, "{:?}", sol.x);
}

#[test]
fn csr_from_triplets_sums_and_rejects() {
    let a = CsrMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 0, 2.0), (1, 0, 4.0)]).unwrap();
    assert_eq!(a.to_dense().as_slice(), &[3.0, 4.0, 0.0, 0.0]);
    assert!(CsrMatrix::<f64>::from_triplets(2, 2, &[(2, 0, 1.0)]).is_err());
    assert!(a.spmv(&[1.0]).is_err());
}

fn small_dims() -> impl Strategy<Value = (usize, usize, u64)> {
    (1usize..12, 1usize..8, any::<u64>()).prop_map(|(r, c, s)| (r.max(c), c, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qr_reconstructs_and_q_is_orthogonal((r, c, seed) in small_dims()) {
        let m = gaussian_matrix(r, c, seed);
        let qr = QrUpdatable::from_matrix(&m).unwrap();
        let back = qr.reconstruct();
        prop_assert!(back.sub(&m).unwrap().frobenius_norm() < 1e-12 * (1.0 + m.frobenius_norm()));
        let q = qr.thin_q();
        prop_assert!(q.gram().sub(&DenseMatrix::identity(c)).unwrap().frobenius_norm() < 1e-13);
        prop_assert!(qr.r_diag().iter().all(|&d| d >= 0.0));
        let y = gaussian_vector(r, seed ^ 1);
        let back = qr.q_mul(&qr.qt_mul(&y).unwrap()).unwrap();
        prop_assert!(max_abs_diff(&back, &y) < 1e-12 * (1.0 + norm2(&y)));
    }

    #[test]
    fn complement_is_orthogonal((r, c, seed) in small_dims()) {
        prop_assume!(c < r);
        let m = gaussian_matrix(r, c, seed);
        let qr = QrUpdatable::from_matrix(&m).unwrap();
        let p = qr.complement_vector(0).unwrap();
        prop_assert!((norm2(&p) - 1.0).abs() < 1e-13);
        for col in m.cols() {
            prop_assert!(dot(col, &p).abs() < 1e-12 * (1.0 + norm2(col)));
        }
    }

    #[test]
    fn spmv_matches_dense(n in 1usize..30, per_row in 0usize..4, seed in any::<u64>()) {
        let a = random_sparse(n, per_row, seed);
        let x = gaussian_vector(n, seed);
        let y = a.spmv(&x).unwrap();
        let yd = a.to_dense().matvec(&x).unwrap();
        prop_assert!(max_abs_diff(&y, &yd) < 1e-13);
        let yt = a.transpose().spmv(&x).unwrap();
        let ytd = a.to_dense().tr_matvec(&x).unwrap();
        prop_assert!(max_abs_diff(&yt, &ytd) < 1e-13);
    }
}

#[test]
fn f32_path_compiles_and_agrees() {
    let m64 = gaussian_matrix(8, 3, 12);
    let m32 = DenseMatrix::<f32>::from_col_major(8, 3, m64.as_slice().iter().map(|&x| x as f32).collect()).unwrap();
    let s32 = singular_values(&m32).unwrap();
    let s64 = singular_values(&m64).unwrap();
    for (a, b) in s32.iter().zip(&s64) {
        assert!((*a as f64 - b).abs() < 1e-5 * s64[0]);
    }
}
