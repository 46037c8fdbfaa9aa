use svdlab_core::golub_kahan::{bidiagonalize, gk_svd_with_stats, rot};
use svdlab_core::{gk_svd, jacobi_svd, orth_tol, DenseMatrix, GkConfig, SymmetricMatrix};
use svdlab_testkit::{random_symmetric, rng};

fn check_bidiagonal(a: &SymmetricMatrix) {
    let n = a.order();
    let nf = a.frobenius_norm();
    let (u1, b, v1) = bidiagonalize(a);
    let t = u1.t_matmul(&a.as_dense().matmul(&v1).unwrap()).unwrap();
    assert!(t.sub(&b.to_dense()).unwrap().frobenius_norm() <= orth_tol(n) * nf);
    assert!(u1.orthogonality_defect() <= orth_tol(n));
    assert!(v1.orthogonality_defect() <= orth_tol(n));
    for i in 0..n {
        for j in 0..n {
            if j != i && j != i + 1 {
                assert!(t[(i, j)].abs() <= orth_tol(n) * nf);
            }
        }
    }
}

#[test]
fn rot_branches() {
    assert_eq!(rot(0.0, 7.0), (0.0, 1.0, 7.0));
    assert_eq!(rot(1.0, 0.0), (1.0, 0.0, 1.0));
    let (c, s, r) = rot(3.0, 4.0);
    assert!((r.abs() - 5.0).abs() <= 8.0 * f64::EPSILON * 5.0);
    assert!((-s * 3.0 + c * 4.0).abs() <= 8.0 * f64::EPSILON * 5.0);
    assert!((c * 3.0 + s * 4.0 - r).abs() <= 8.0 * f64::EPSILON * 5.0);
    assert!((c * c + s * s - 1.0).abs() <= 4.0 * f64::EPSILON);
}

#[test]
fn diagonal_input_is_already_bidiagonal() {
    let a = SymmetricMatrix::new(DenseMatrix::from_diag(&[1.0, 2.0, 3.0])).unwrap();
    let (u1, b, v1) = bidiagonalize(&a);
    for i in 0..3 {
        assert_eq!(b.diag[i].abs(), (i + 1) as f64);
        for j in 0..3 {
            assert_eq!(u1[(i, j)].abs(), if i == j { 1.0 } else { 0.0 });
            assert_eq!(v1[(i, j)].abs(), if i == j { 1.0 } else { 0.0 });
        }
    }
    assert_eq!(b.sup, vec![0.0, 0.0]);
}

#[test]
fn random_bidiagonalization() {
    let mut r = rng(5);
    for _ in 0..5 {
        check_bidiagonal(&random_symmetric(5, &mut r));
    }
    check_bidiagonal(&random_symmetric(40, &mut r));
}

#[test]
fn two_by_two_has_no_right_reflector() {
    let a = SymmetricMatrix::from_rows(&[vec![3.0, -1.0], vec![-1.0, 0.5]]).unwrap();
    let (u1, b, v1) = bidiagonalize(&a);
    assert_eq!(v1, DenseMatrix::identity(2));
    let ua = u1.t_matmul(a.as_dense()).unwrap();
    assert!(ua.sub(&b.to_dense()).unwrap().max_abs() <= orth_tol(2) * a.frobenius_norm());
}

#[test]
fn identity_converges_immediately() {
    let (s, stats) = gk_svd_with_stats(&SymmetricMatrix::identity(4), &GkConfig::default()).unwrap();
    assert_eq!(s.sigma, vec![1.0; 4]);
    assert_eq!(stats.sweeps, 0);
}

#[test]
fn two_by_two_singular_values() {
    let a = SymmetricMatrix::from_rows(&[vec![16.7118, 10.7270], vec![10.7270, 34.2341]]).unwrap();
    let s = gk_svd(&a, &GkConfig::default()).unwrap();
    assert!((s.sigma[0] - 39.3231).abs() < 5e-5);
    assert!((s.sigma[1] - 11.6228).abs() < 5e-5);
}

#[test]
fn agrees_with_jacobi() {
    let mut r = rng(10);
    for _ in 0..5 {
        let a = random_symmetric(10, &mut r);
        let g = gk_svd(&a, &GkConfig::default()).unwrap();
        let j = jacobi_svd(&a, &Default::default()).unwrap();
        for (x, y) in g.sigma.iter().zip(&j.sigma) {
            assert!((x - y).abs() <= 1e-9 * j.sigma[0]);
        }
        assert!(g.relative_residual(&a) <= orth_tol(10));
        assert!(g.orthogonality_defect() <= orth_tol(10));
    }
}

#[test]
fn superdiagonal_sum_vanishes() {
    let mut r = rng(21);
    for n in [6, 12, 25] {
        let a = random_symmetric(n, &mut r);
        let cfg = GkConfig::default();
        let (s, stats) = gk_svd_with_stats(&a, &cfg).unwrap();
        let sums = &stats.superdiag_sums;
        assert_eq!(sums.len(), stats.sweeps);
        assert!(stats.sweeps < 30 * n * n);
        assert!(sums.last().unwrap() < &sums[0]);
        assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
        assert!(s.sigma.iter().all(|&x| x >= 0.0));
        assert!(s.relative_residual(&a) <= orth_tol(n));
    }
}

/// Two adjacent diagonal entries of nearly equal magnitude in the wrong order
/// exchange places before the coupling between them decays, so the sum of
/// `|e|` over a five-sweep window is not monotone in general.
#[test]
fn superdiagonal_sum_can_rise_over_five_sweeps() {
    let mut r = rng(21);
    let _ = random_symmetric(6, &mut r);
    let a = random_symmetric(12, &mut r);
    let (_, stats) = gk_svd_with_stats(&a, &GkConfig::default()).unwrap();
    let sums = &stats.superdiag_sums;
    assert!((5..sums.len()).step_by(5).any(|k| sums[k] > sums[k - 5]));
}

#[test]
fn negative_definite_input() {
    let a = SymmetricMatrix::from_rows(&[vec![-4.0, 1.0, 0.0], vec![1.0, -3.0, 1.0], vec![0.0, 1.0, -2.0]]).unwrap();
    let s = gk_svd(&a, &GkConfig::default()).unwrap();
    assert!(s.relative_residual(&a) <= orth_tol(3));
    let j = jacobi_svd(&a, &Default::default()).unwrap();
    for (x, y) in s.sigma.iter().zip(&j.sigma) {
        assert!((x - y).abs() <= 1e-12 * j.sigma[0]);
    }
}
