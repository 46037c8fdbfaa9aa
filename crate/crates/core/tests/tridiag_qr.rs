use proptest::prelude::*;
use svdlab_core::tridiag::{symmetric_qr_eig_with_stats, tridiagonalize_with, wilkinson_shift, Orientation, Reduction};
use svdlab_core::{
    jacobi_eig, jacobi_svd, orth_tol, symmetric_qr_eig, tridiag_qr_svd, tridiagonalize, DenseMatrix, QrConfig,
    SymmetricMatrix, TridiagonalMatrix,
};
use svdlab_testkit::{max_abs_diff, random_symmetric, random_tridiagonal, rng};

fn sorted_jacobi(a: &SymmetricMatrix) -> Vec<f64> {
    let mut l = jacobi_eig(a, &Default::default()).unwrap().lambda;
    l.sort_by(f64::total_cmp);
    l
}

fn check_reduction(a: &SymmetricMatrix, reduction: Reduction) {
    let n = a.order();
    let nf = a.frobenius_norm();
    let (q, t) = tridiagonalize_with(a, reduction);
    let qaq = q.t_matmul(&a.as_dense().matmul(&q).unwrap()).unwrap();
    assert!(qaq.sub(&t.to_dense()).unwrap().frobenius_norm() <= orth_tol(n) * nf);
    assert!(q.orthogonality_defect() <= orth_tol(n));
    for i in 0..n {
        for j in 0..n {
            if i.abs_diff(j) > 1 {
                assert!(qaq[(i, j)].abs() <= orth_tol(n) * nf);
            }
        }
    }
}

#[test]
fn tridiagonal_input_is_untouched() {
    let t = TridiagonalMatrix::new(vec![1.0, 2.0, 3.0, 4.0], vec![0.5, -0.25, 2.0]).unwrap();
    let (q, t2) = tridiagonalize(&t.to_symmetric());
    assert_eq!(q, DenseMatrix::identity(4));
    assert_eq!(t2, t);
}

#[test]
fn all_ones_spectrum() {
    let a = SymmetricMatrix::new(DenseMatrix::from_vec(4, 4, vec![1.0; 16]).unwrap()).unwrap();
    let (_, t) = tridiagonalize(&a);
    let l = sorted_jacobi(&t.to_symmetric());
    assert!(max_abs_diff(&l, &[0.0, 0.0, 0.0, 4.0]) <= 1e-14);
}

#[test]
fn trace_is_preserved() {
    let a = random_symmetric(6, &mut rng(61));
    let (_, t) = tridiagonalize(&a);
    let tr: f64 = t.diag().iter().sum();
    assert!((tr - a.as_dense().trace()).abs() <= 1e-12 * a.frobenius_norm());
}

#[test]
fn reductions_meet_postconditions() {
    let mut r = rng(62);
    for n in [1, 2, 3, 7, 33, 70, 130] {
        let a = random_symmetric(n, &mut r);
        check_reduction(&a, Reduction::Householder);
        if n <= 33 {
            check_reduction(&a, Reduction::Givens);
        }
    }
}

fn tri(d: &[f64], e: &[f64]) -> TridiagonalMatrix {
    TridiagonalMatrix::new(d.to_vec(), e.to_vec()).unwrap()
}

#[test]
fn wilkinson_examples() {
    assert_eq!(wilkinson_shift(&tri(&[7.0, 2.0, 5.0], &[1.0, 0.0])), 5.0);
    assert_eq!(wilkinson_shift(&tri(&[2.0, 2.0], &[1.0])), 1.0);
    let mu = wilkinson_shift(&tri(&[5.0, 1.0], &[2.0]));
    assert!((mu - (3.0 - 8f64.sqrt())).abs() <= 8.0 * f64::EPSILON * 5.0);
}

#[test]
fn diagonal_tridiagonal_sorts() {
    let e = symmetric_qr_eig(&tri(&[3.0, 1.0, 2.0], &[0.0, 0.0]), &QrConfig::default()).unwrap();
    assert_eq!(e.lambda, vec![1.0, 2.0, 3.0]);
    for j in 0..3 {
        assert_eq!(e.x.col(j).iter().filter(|x| x.abs() == 1.0).count(), 1);
    }
}

#[test]
fn two_by_two_eigenvalues() {
    let a = SymmetricMatrix::from_rows(&[vec![16.7118, 10.7270], vec![10.7270, 34.2341]]).unwrap();
    let (_, t) = tridiagonalize(&a);
    let e = symmetric_qr_eig(&t, &QrConfig::default()).unwrap();
    assert!((e.lambda[0] - 11.6228).abs() < 5e-5);
    assert!((e.lambda[1] - 39.3231).abs() < 5e-5);
    let s = tridiag_qr_svd(&a, &QrConfig::default()).unwrap();
    assert!((s.sigma[0] - 39.3231).abs() < 5e-5);
    assert!((s.sigma[1] - 11.6228).abs() < 5e-5);
}

#[test]
fn random_tridiagonal_matches_jacobi() {
    let mut r = rng(12);
    for _ in 0..5 {
        let t = random_tridiagonal(12, &mut r);
        let e = symmetric_qr_eig(&t, &QrConfig::default()).unwrap();
        assert!(max_abs_diff(&e.lambda, &sorted_jacobi(&t.to_symmetric())) <= 1e-10);
        assert!(e.max_residual(&t.to_dense()) <= orth_tol(12) * t.frobenius_norm());
        assert!(e.x.orthogonality_defect() <= orth_tol(12));
    }
}

#[test]
fn svd_composition() {
    let s = tridiag_qr_svd(&SymmetricMatrix::identity(5), &QrConfig::default()).unwrap();
    assert_eq!(s.sigma, vec![1.0; 5]);
    let a = random_symmetric(20, &mut rng(20));
    let s = tridiag_qr_svd(&a, &QrConfig::default()).unwrap();
    let j = jacobi_svd(&a, &Default::default()).unwrap();
    for (x, y) in s.sigma.iter().zip(&j.sigma) {
        assert!((x - y).abs() <= 1e-9 * j.sigma[0]);
    }
    assert!(s.relative_residual(&a) <= orth_tol(20));
    assert!(s.orthogonality_defect() <= orth_tol(20));
}

#[test]
fn givens_reduction_feeds_qr() {
    let a = random_symmetric(15, &mut rng(15));
    let cfg = QrConfig { reduction: Reduction::Givens, ..Default::default() };
    let s = tridiag_qr_svd(&a, &cfg).unwrap();
    assert!(s.relative_residual(&a) <= orth_tol(15));
}

#[test]
fn graded_matrix_orientation_follows_end_entries() {
    let d: Vec<f64> = (0..8).map(|i| 10f64.powi(-i)).collect();
    let e: Vec<f64> = (0..7).map(|i| 0.5 * 10f64.powi(-i)).collect();
    let t = tri(&d, &e);
    let (res, stats) = symmetric_qr_eig_with_stats(&t, &QrConfig::default()).unwrap();
    assert!(stats.qr_sweeps > 0);
    assert!(res.max_residual(&t.to_dense()) <= orth_tol(8) * t.frobenius_norm());
    let flipped = tri(&d.iter().rev().copied().collect::<Vec<_>>(), &e.iter().rev().copied().collect::<Vec<_>>());
    let (res, stats) = symmetric_qr_eig_with_stats(&flipped, &QrConfig::default()).unwrap();
    assert!(stats.ql_sweeps > 0);
    assert!(res.max_residual(&flipped.to_dense()) <= orth_tol(8) * flipped.frobenius_norm());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn qr_and_ql_branches_agree(seed in 0u64..10_000, n in 2usize..30) {
        let t = random_tridiagonal(n, &mut rng(seed));
        let tf = t.frobenius_norm();
        let mut sets = Vec::new();
        for o in [Orientation::QrOnly, Orientation::QlOnly] {
            let cfg = QrConfig { orientation: o, ..Default::default() };
            let (e, stats) = symmetric_qr_eig_with_stats(&t, &cfg).unwrap();
            prop_assert!(stats.trace_drift <= 8.0 * f64::EPSILON * tf);
            prop_assert!(e.max_residual(&t.to_dense()) <= orth_tol(n) * tf);
            prop_assert!(e.x.orthogonality_defect() <= orth_tol(n));
            prop_assert!(e.lambda.windows(2).all(|w| w[0] <= w[1]));
            sets.push(e.lambda);
        }
        prop_assert!(max_abs_diff(&sets[0], &sets[1]) <= orth_tol(n) * tf);
    }
}
