//! Golub–Kahan SVD: Householder bidiagonalization followed by the
//! zero-shift implicit QR chase on the bidiagonal.
//!
//! The chase alternates a right rotation that clears `B(i, i+1)` with a left
//! rotation that clears the bulge at `B(i+1, i)`. With a zero shift the
//! would-be bulge at `B(i, i+2)` is annihilated by the next right rotation
//! as well, so the sweep can be carried out on the `(d, e)` arrays alone.

use crate::error::{Error, Result, Stage};
use crate::matrix::{norm2, DenseMatrix, SvdResult, SymmetricMatrix};
use crate::svd::sort_svd;
use crate::transforms::{rotate_rows, Reflector};

pub use crate::transforms::rot;

/// Upper bidiagonal matrix: `diag` on the diagonal, `sup` just above it.
#[derive(Debug, Clone, PartialEq)]
pub struct BidiagonalMatrix {
    pub diag: Vec<f64>,
    pub sup: Vec<f64>,
}

impl BidiagonalMatrix {
    pub fn new(diag: Vec<f64>, sup: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || sup.len() + 1 != diag.len() {
            return Err(Error::LengthMismatch { expected: diag.len().saturating_sub(1), found: sup.len() });
        }
        if diag.iter().chain(&sup).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(BidiagonalMatrix { diag, sup })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut m = DenseMatrix::from_diag(&self.diag);
        for (i, &e) in self.sup.iter().enumerate() {
            m[(i, i + 1)] = e;
        }
        m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GkConfig {
    /// Split where `|e_i| ≤ tol · (|d_i| + |d_{i+1}|)`.
    pub tol: f64,
    /// Sweep budget; `None` means `30 n²`.
    pub max_iter: Option<usize>,
}

impl Default for GkConfig {
    fn default() -> Self {
        GkConfig { tol: f64::EPSILON, max_iter: None }
    }
}

#[derive(Debug, Clone, Default)]
pub struct GkStats {
    pub sweeps: usize,
    pub direct_2x2: usize,
    /// `Σ|e_i|` before each sweep.
    pub superdiag_sums: Vec<f64>,
}

/// `U₁ᵀ A V₁ = B` by alternating left (column) and right (row) reflectors.
pub fn bidiagonalize(a: &SymmetricMatrix) -> (DenseMatrix, BidiagonalMatrix, DenseMatrix) {
    let (ut, b, vt) = bidiagonalize_transposed(a);
    (ut.transpose(), b, vt.transpose())
}

/// Same as [`bidiagonalize`] but returns `U₁ᵀ` and `V₁ᵀ`.
fn bidiagonalize_transposed(a: &SymmetricMatrix) -> (DenseMatrix, BidiagonalMatrix, DenseMatrix) {
    let n = a.order();
    let mut m = a.as_dense().clone();
    // Accumulate U₁ and V₁ by rows; transposed at the end.
    let mut u1 = DenseMatrix::identity(n);
    let mut v1 = DenseMatrix::identity(n);

    for k in 0..n.saturating_sub(1) {
        let col: Vec<f64> = (k..n).map(|i| m[(i, k)]).collect();
        if let Some((h, sigma)) = Reflector::annihilating(&col) {
            h.apply_left(m.as_mut_slice(), n, k, k);
            m[(k, k)] = sigma;
            for i in (k + 1)..n {
                m[(i, k)] = 0.0;
            }
            for r in 0..n {
                h.apply_right(u1.row_mut(r), k);
            }
        }
        if k + 2 < n {
            let row: Vec<f64> = m.row(k)[k + 1..].to_vec();
            if let Some((h, sigma)) = Reflector::annihilating(&row) {
                for r in k..n {
                    h.apply_right(m.row_mut(r), k + 1);
                }
                m[(k, k + 1)] = sigma;
                for j in (k + 2)..n {
                    m[(k, j)] = 0.0;
                }
                for r in 0..n {
                    h.apply_right(v1.row_mut(r), k + 1);
                }
            }
        }
    }

    let diag = (0..n).map(|i| m[(i, i)]).collect();
    let sup = (0..n.saturating_sub(1)).map(|i| m[(i, i + 1)]).collect();
    (u1.transpose(), BidiagonalMatrix { diag, sup }, v1.transpose())
}

pub fn gk_svd(a: &SymmetricMatrix, cfg: &GkConfig) -> Result<SvdResult> {
    gk_svd_with_stats(a, cfg).map(|(s, _)| s)
}

pub fn gk_svd_with_stats(a: &SymmetricMatrix, cfg: &GkConfig) -> Result<(SvdResult, GkStats)> {
    if !(cfg.tol > 0.0) {
        return Err(Error::Config(format!("invalid Golub-Kahan tolerance {}", cfg.tol)));
    }
    let n = a.order();
    let (mut ut, b, mut vt) = bidiagonalize_transposed(a);
    let BidiagonalMatrix { diag: mut d, sup: mut e } = b;
    let max_iter = cfg.max_iter.unwrap_or(30 * n * n).max(1);
    let mut stats = GkStats::default();

    loop {
        for i in 0..e.len() {
            if e[i].abs() <= cfg.tol * (d[i].abs() + d[i + 1].abs()) {
                e[i] = 0.0;
            }
        }
        let Some((lo, hi)) = active_block(&e) else { break };
        if hi - lo == 1 {
            solve_2x2(&mut d, &mut e, lo, &mut ut, &mut vt);
            stats.direct_2x2 += 1;
            continue;
        }
        if stats.sweeps == max_iter {
            return Err(Error::NoConvergence { stage: Stage::GolubKahan, detail: stats.sweeps });
        }
        stats.superdiag_sums.push(e.iter().map(|x| x.abs()).sum());
        zero_shift_sweep(&mut d, &mut e, lo, hi, &mut ut, &mut vt);
        stats.sweeps += 1;
    }

    // Σ = |d|, with the matching V column negated.
    for (i, di) in d.iter_mut().enumerate() {
        if *di < 0.0 {
            *di = -*di;
            for x in vt.row_mut(i) {
                *x = -*x;
            }
        }
    }
    Ok((sort_svd(ut.transpose(), d, vt.transpose()), stats))
}

/// Bottom-most unreduced block `[lo, hi]` with `hi > lo`.
pub(crate) fn active_block(e: &[f64]) -> Option<(usize, usize)> {
    let mut hi = e.len();
    while hi > 0 && e[hi - 1] == 0.0 {
        hi -= 1;
    }
    if hi == 0 {
        return None;
    }
    let mut lo = hi - 1;
    while lo > 0 && e[lo - 1] != 0.0 {
        lo -= 1;
    }
    Some((lo, hi))
}

fn zero_shift_sweep(d: &mut [f64], e: &mut [f64], lo: usize, hi: usize, ut: &mut DenseMatrix, vt: &mut DenseMatrix) {
    let mut cs = 1.0;
    let mut oldcs = 1.0;
    let mut oldsn = 0.0;
    for i in lo..hi {
        let (c, s, r) = rot(d[i] * cs, e[i]);
        cs = c;
        if i > lo {
            e[i - 1] = oldsn * r;
        }
        let (oc, os, di) = rot(oldcs * r, d[i + 1] * s);
        oldcs = oc;
        oldsn = os;
        d[i] = di;
        let (x, y) = vt.two_rows_mut(i, i + 1);
        rotate_rows(x, y, c, -s);
        let (x, y) = ut.two_rows_mut(i, i + 1);
        rotate_rows(x, y, oc, -os);
    }
    let h = d[hi] * cs;
    d[hi] = h * oldcs;
    e[hi - 1] = h * oldsn;
}

/// Diagonalizes the 2×2 block `[[d_lo, e_lo], [0, d_lo+1]]` in closed form.
fn solve_2x2(d: &mut [f64], e: &mut [f64], lo: usize, ut: &mut DenseMatrix, vt: &mut DenseMatrix) {
    let (f, g, h) = (d[lo], e[lo], d[lo + 1]);
    // Right rotation from the Jacobi rotation of MᵀM.
    let (c, s) = if f * g == 0.0 {
        // f = 0: the first column is zero; swap it to the back.
        (0.0, -1.0)
    } else {
        let xi = (g * g + h * h - f * f) / (2.0 * f * g);
        let t = if xi < 0.0 { -1.0 } else { 1.0 } / (xi.abs() + xi.hypot(1.0));
        let c = 1.0 / t.hypot(1.0);
        (c, c * t)
    };
    // Columns of M V with V = [[c, s], [-s, c]].
    let m1 = [f * c - g * s, -h * s];
    let m2 = [f * s + g * c, h * c];
    let (n1, n2) = (norm2(&m1), norm2(&m2));
    let (a, b, d1, d2);
    if n1 >= n2 {
        a = m1[0] / n1;
        b = m1[1] / n1;
        d1 = n1;
        d2 = -b * m2[0] + a * m2[1];
    } else {
        // u₂ = (p, q), u₁ = (q, −p).
        let (p, q) = (m2[0] / n2, m2[1] / n2);
        a = q;
        b = -p;
        d2 = n2;
        d1 = a * m1[0] + b * m1[1];
    }
    d[lo] = d1;
    d[lo + 1] = d2;
    e[lo] = 0.0;
    let (x, y) = ut.two_rows_mut(lo, lo + 1);
    rotate_rows(x, y, a, -b);
    let (x, y) = vt.two_rows_mut(lo, lo + 1);
    rotate_rows(x, y, c, s);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::orth_tol;

    fn check_bidiag(a: &SymmetricMatrix) {
        let n = a.order();
        let (u1, b, v1) = bidiagonalize(a);
        let t = u1.t_matmul(a.as_dense()).unwrap().matmul(&v1).unwrap();
        let nf = a.frobenius_norm();
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
    fn diagonal_input_is_untouched() {
        let a = SymmetricMatrix::new(DenseMatrix::from_diag(&[1.0, 2.0, 3.0])).unwrap();
        let (u1, b, v1) = bidiagonalize(&a);
        assert_eq!(b.diag, vec![1.0, 2.0, 3.0]);
        assert_eq!(b.sup, vec![0.0, 0.0]);
        assert_eq!(u1, DenseMatrix::identity(3));
        assert_eq!(v1, DenseMatrix::identity(3));
    }

    #[test]
    fn two_by_two_uses_only_left_reflector() {
        let a = SymmetricMatrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 5.0]]).unwrap();
        let (_, _, v1) = bidiagonalize(&a);
        assert_eq!(v1, DenseMatrix::identity(2));
        check_bidiag(&a);
    }

    #[test]
    fn dense_5x5_residual() {
        let a = SymmetricMatrix::from_rows(&[
            vec![4.0, 1.0, -2.0, 0.5, 3.0],
            vec![1.0, -3.0, 0.0, 2.0, 1.5],
            vec![-2.0, 0.0, 1.0, -1.0, 0.25],
            vec![0.5, 2.0, -1.0, 2.0, -0.75],
            vec![3.0, 1.5, 0.25, -0.75, 0.0],
        ])
        .unwrap();
        check_bidiag(&a);
        let s = gk_svd(&a, &Default::default()).unwrap();
        assert!(s.relative_residual(&a) <= orth_tol(5), "{} {:?}", s.relative_residual(&a), s.sigma);
        assert!(s.orthogonality_defect() <= orth_tol(5));
    }

    #[test]
    fn identity() {
        let s = gk_svd(&SymmetricMatrix::identity(4), &Default::default()).unwrap();
        assert_eq!(s.sigma, vec![1.0; 4]);
    }

    #[test]
    fn worked_example() {
        let a = SymmetricMatrix::from_rows(&[vec![16.7118, 10.7270], vec![10.7270, 34.2341]]).unwrap();
        let s = gk_svd(&a, &Default::default()).unwrap();
        assert!((s.sigma[0] - 39.3231).abs() < 5e-5);
        assert!((s.sigma[1] - 11.6228).abs() < 5e-5);
        assert!(s.relative_residual(&a) <= orth_tol(2));
    }

    #[test]
    fn direct_2x2_handles_zero_first_diagonal() {
        let a = SymmetricMatrix::from_rows(&[vec![0.0, 3.0], vec![3.0, 0.0]]).unwrap();
        let s = gk_svd(&a, &Default::default()).unwrap();
        assert!((s.sigma[0] - 3.0).abs() < 1e-14 && (s.sigma[1] - 3.0).abs() < 1e-14);
        assert!(s.relative_residual(&a) <= orth_tol(2));
    }

    #[test]
    fn active_block_selection() {
        assert_eq!(active_block(&[0.0, 0.0]), None);
        assert_eq!(active_block(&[1.0, 0.0, 2.0, 3.0]), Some((2, 4)));
        assert_eq!(active_block(&[1.0, 1.0, 0.0]), Some((0, 2)));
    }

    #[test]
    fn sweep_budget_exhaustion() {
        let a = SymmetricMatrix::from_rows(&[vec![2.0, 1.0, 0.5], vec![1.0, 3.0, 1.0], vec![0.5, 1.0, 4.0]]).unwrap();
        let cfg = GkConfig { tol: 1e-12, max_iter: Some(1) };
        assert!(matches!(gk_svd(&a, &cfg), Err(Error::NoConvergence { stage: Stage::GolubKahan, .. })));
    }
}
