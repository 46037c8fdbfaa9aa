use proptest::prelude::*;
use svdlab_core::io::{format_matrix, parse_matrix};
use svdlab_core::permutation::{apply_permutation, sort_poles, Permutation};
use svdlab_core::transforms::{givens, houszero};
use svdlab_core::{jacobi_eig, orth_tol, svd_from_eig, DenseMatrix, EigResult, Error, SymmetricMatrix};
use svdlab_testkit::{random_symmetric, rng};

const EPS: f64 = f64::EPSILON;

/// `Gᵀ(a, b)` for `G = [[c, s], [−s, c]]`.
fn rotate(c: f64, s: f64, a: f64, b: f64) -> (f64, f64) {
    (c * a - s * b, s * a + c * b)
}

fn reflect(u: &[f64], x: &[f64]) -> Vec<f64> {
    let uu: f64 = u.iter().map(|v| v * v).sum();
    let ux: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
    x.iter().zip(u).map(|(xi, ui)| xi - 2.0 * ux / uu * ui).collect()
}

#[test]
fn givens_identity_branch() {
    assert_eq!(givens(5.0, 0.0), (1.0, 0.0));
}

#[test]
fn givens_pure_swap() {
    let (c, s) = givens(0.0, 1.0);
    assert_eq!(c, 0.0);
    assert_eq!(s.abs(), 1.0);
    let (r, z) = rotate(c, s, 0.0, 1.0);
    assert_eq!(r.abs(), 1.0);
    assert_eq!(z, 0.0);
}

#[test]
fn givens_three_four() {
    let (c, s) = givens(3.0, 4.0);
    assert!((c * c + s * s - 1.0).abs() <= 4.0 * EPS);
    let (r, z) = rotate(c, s, 3.0, 4.0);
    assert!(z.abs() <= 8.0 * EPS * 5.0);
    assert!((r.abs() - 5.0).abs() <= 8.0 * EPS * 5.0);
}

#[test]
fn houszero_aligned_vector() {
    let x = [1.0, 0.0, 0.0];
    let (u, _) = houszero(&x).unwrap();
    let hx = reflect(&u, &x);
    assert!((hx[0].abs() - 1.0).abs() <= 8.0 * 3.0 * EPS);
    assert_eq!(&hx[1..], &[0.0, 0.0]);
}

#[test]
fn houszero_three_four() {
    let x = [3.0, 4.0];
    let (u, _) = houszero(&x).unwrap();
    let hx = reflect(&u, &x);
    assert!((hx[0].abs() - 5.0).abs() <= 16.0 * EPS * 5.0);
    assert!(hx[1].abs() <= 16.0 * EPS * 5.0);
}

#[test]
fn houszero_all_ones() {
    let x = [1.0; 4];
    let (u, _) = houszero(&x).unwrap();
    let hx = reflect(&u, &x);
    assert!((hx[0].abs() - 2.0).abs() <= 32.0 * EPS * 2.0);
    for v in &hx[1..] {
        assert!(v.abs() <= 32.0 * EPS * 2.0);
    }
}

#[test]
fn houszero_rejects_zero() {
    assert!(matches!(houszero(&[0.0, 0.0]), Err(Error::ZeroVector)));
}

#[test]
fn svd_from_eig_diagonal() {
    let e = EigResult { x: DenseMatrix::identity(2), lambda: vec![2.0, -3.0] };
    let s = svd_from_eig(&e);
    assert_eq!(s.sigma, vec![3.0, 2.0]);
    assert_eq!(s.u, DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
    assert_eq!(s.v, DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap());
}

#[test]
fn svd_from_eig_zero_sign() {
    let e = EigResult { x: DenseMatrix::identity(1), lambda: vec![0.0] };
    let s = svd_from_eig(&e);
    assert_eq!(s.sigma, vec![0.0]);
    assert_eq!(s.v, DenseMatrix::identity(1));
}

#[test]
fn svd_from_jacobi_reconstructs() {
    let mut r = rng(11);
    for _ in 0..10 {
        let a = random_symmetric(4, &mut r);
        let s = svd_from_eig(&jacobi_eig(&a, &Default::default()).unwrap());
        assert!(s.relative_residual(&a) <= 1e-12);
        assert!(s.sigma.windows(2).all(|w| w[0] >= w[1]));
    }
}

#[test]
fn permutation_worked_example() {
    let d = [13.1247, 201.9311, 0.0693, 26.7189];
    let u = [-0.5421, -0.4540, 0.2128, -0.6743];
    let (_, d2, u2) = sort_poles(&d, &u).unwrap();
    assert_eq!(d2, vec![0.0693, 13.1247, 26.7189, 201.9311]);
    assert_eq!(u2, vec![0.2128, -0.5421, -0.6743, -0.4540]);
}

#[test]
fn permutation_of_sorted_is_identity() {
    let d = [1.0, 2.0, 5.0];
    let u = [0.3, -0.2, 0.1];
    let p = Permutation::sorting(&d);
    assert!(p.is_identity());
    assert_eq!(apply_permutation(&p, &d, &u).unwrap(), (d.to_vec(), u.to_vec()));
}

#[test]
fn permutation_symbolic_relabel() {
    let (_, d2, u2) = sort_poles(&[3.0, 1.0, 2.0], &[10.0, 20.0, 30.0]).unwrap();
    assert_eq!(d2, vec![1.0, 2.0, 3.0]);
    assert_eq!(u2, vec![20.0, 30.0, 10.0]);
}

#[test]
fn permutation_length_mismatch() {
    let p = Permutation::identity(2);
    assert!(matches!(apply_permutation(&p, &[1.0, 2.0], &[1.0]), Err(Error::LengthMismatch { .. })));
}

#[test]
fn permutation_sort_is_stable() {
    let p = Permutation::sorting(&[2.0, 1.0, 2.0, 1.0]);
    assert_eq!(p.as_slice(), &[1, 3, 0, 2]);
}

#[test]
fn symmetric_rejects_asymmetry() {
    let m = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0 + 1e-6, 1.0]]).unwrap();
    assert!(matches!(SymmetricMatrix::new(m), Err(Error::NotSymmetric { .. })));
    let m = DenseMatrix::from_rows(&[vec![1.0, f64::NAN], vec![f64::NAN, 1.0]]);
    assert!(m.is_err() || SymmetricMatrix::new(m.unwrap()).is_err());
}

#[test]
fn text_format_round_trip() {
    let mut r = rng(3);
    let a = random_symmetric(5, &mut r).into_dense();
    let text = format_matrix(&a);
    assert!(text.starts_with("5\n"));
    assert_eq!(parse_matrix(&text).unwrap(), a);
    let sci = parse_matrix("2\n1e0 -2.5E-1\n-0.25 3\n").unwrap();
    assert_eq!(sci[(0, 1)], -0.25);
    assert!(parse_matrix("2\n1 2\n3\n").is_err());
}

proptest! {
    #[test]
    fn givens_is_a_rotation(a in -1e6f64..1e6, b in -1e6f64..1e6) {
        let (c, s) = givens(a, b);
        prop_assert!((c * c + s * s - 1.0).abs() <= 4.0 * EPS);
        let (r, z) = rotate(c, s, a, b);
        let h = a.hypot(b);
        prop_assert!(z.abs() <= 8.0 * EPS * h.max(f64::MIN_POSITIVE));
        prop_assert!((r.abs() - h).abs() <= 8.0 * EPS * h);
    }

    #[test]
    fn householder_is_orthogonal_involution(x in prop::collection::vec(-10.0f64..10.0, 1..12)) {
        prop_assume!(x.iter().any(|&v| v != 0.0));
        let n = x.len();
        let (u, _) = houszero(&x).unwrap();
        let uu: f64 = u.iter().map(|v| v * v).sum();
        let mut h = DenseMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] -= 2.0 * u[i] * u[j] / uu;
            }
        }
        let hh = h.matmul(&h).unwrap();
        let id = DenseMatrix::identity(n);
        prop_assert!(hh.sub(&id).unwrap().max_abs() <= orth_tol(n));
        prop_assert!(h.orthogonality_defect() <= orth_tol(n));
        let hx = h.matvec(&x).unwrap();
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        prop_assert!((hx[0].abs() - nx).abs() <= 8.0 * n as f64 * EPS * nx);
    }

    #[test]
    fn permutation_inverse_undoes(d in prop::collection::vec(-100.0f64..100.0, 1..20)) {
        let u: Vec<f64> = (0..d.len()).map(|i| i as f64).collect();
        let (p, d2, u2) = sort_poles(&d, &u).unwrap();
        prop_assert!(d2.windows(2).all(|w| w[0] <= w[1]));
        let (d3, u3) = apply_permutation(&p.inverse(), &d2, &u2).unwrap();
        prop_assert_eq!(d3, d);
        prop_assert_eq!(u3, u);
    }

    #[test]
    fn svd_from_eig_keeps_reconstruction(seed in 0u64..1000, n in 1usize..8) {
        let a = random_symmetric(n, &mut rng(seed));
        let e = jacobi_eig(&a, &Default::default()).unwrap();
        let s = svd_from_eig(&e);
        prop_assert!(s.relative_residual(&a) <= orth_tol(n));
        prop_assert!(s.sigma.iter().all(|&x| x >= 0.0));
        prop_assert!(s.orthogonality_defect() <= orth_tol(n));
    }
}
