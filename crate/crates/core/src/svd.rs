//! Converting a symmetric eigendecomposition into an SVD.

use crate::matrix::{sign, DenseMatrix, EigResult, SvdResult};

/// `σᵢ = |λᵢ|`, `vᵢ = sign(λᵢ) uᵢ` with `sign(0) = 1`, sorted so that Σ is
/// non-increasing. Ties keep their input order.
pub fn svd_from_eig(e: &EigResult) -> SvdResult {
    let n = e.lambda.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| e.lambda[b].abs().total_cmp(&e.lambda[a].abs()));
    let u = e.x.select_columns(&order);
    let mut v = u.clone();
    let signs: Vec<f64> = order.iter().map(|&i| sign(e.lambda[i])).collect();
    for r in 0..v.rows() {
        for (x, s) in v.row_mut(r).iter_mut().zip(&signs) {
            *x *= s;
        }
    }
    let sigma = order.iter().map(|&i| e.lambda[i].abs()).collect();
    SvdResult { u, sigma, v }
}

/// Sorts an SVD whose factors are already consistent into non-increasing Σ.
pub(crate) fn sort_svd(u: DenseMatrix, sigma: Vec<f64>, v: DenseMatrix) -> SvdResult {
    let mut order: Vec<usize> = (0..sigma.len()).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    SvdResult {
        u: u.select_columns(&order),
        sigma: order.iter().map(|&i| sigma[i]).collect(),
        v: v.select_columns(&order),
    }
}

/// Eigenvalues recovered from a symmetric SVD: `λᵢ = σᵢ · sign(uᵢ · vᵢ)`,
/// sorted ascending.
pub fn eigenvalues_from_svd(s: &SvdResult) -> Vec<f64> {
    let n = s.sigma.len();
    let mut lambda: Vec<f64> = (0..n)
        .map(|j| {
            let d: f64 = (0..s.u.rows()).map(|i| s.u[(i, j)] * s.v[(i, j)]).sum();
            s.sigma[j] * sign(d)
        })
        .collect();
    lambda.sort_by(f64::total_cmp);
    lambda
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal_with_negative_eigenvalue() {
        let e = EigResult { x: DenseMatrix::identity(2), lambda: vec![2.0, -3.0] };
        let s = svd_from_eig(&e);
        assert_eq!(s.sigma, vec![3.0, 2.0]);
        assert_eq!(s.u, DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap());
        assert_eq!(s.v, DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap());
    }

    #[test]
    fn zero_eigenvalue_keeps_sign() {
        let e = EigResult { x: DenseMatrix::identity(1), lambda: vec![0.0] };
        let s = svd_from_eig(&e);
        assert_eq!(s.sigma, vec![0.0]);
        assert_eq!(s.v[(0, 0)], 1.0);
    }

    #[test]
    fn negative_zero_counts_as_zero() {
        let e = EigResult { x: DenseMatrix::identity(1), lambda: vec![-0.0] };
        assert_eq!(svd_from_eig(&e).v[(0, 0)], 1.0);
    }
}
