//! Elementary orthogonal transforms: plane rotations and Householder reflectors.

use crate::error::{Error, Result};
use crate::matrix::{dot, sign};

/// Rotation `(c, s)` such that `Gᵀ (a, b)ᵀ = (r, 0)ᵀ` for `G = [[c, s], [-s, c]]`.
///
/// The divisor is always the larger of `|a|`, `|b|`.
pub fn givens(a: f64, b: f64) -> (f64, f64) {
    if b == 0.0 {
        (1.0, 0.0)
    } else if b.abs() > a.abs() {
        let tau = -a / b;
        let s = 1.0 / tau.hypot(1.0);
        (s * tau, s)
    } else {
        let tau = -b / a;
        let c = 1.0 / tau.hypot(1.0);
        (c, c * tau)
    }
}

/// Rotation `(c, s, r)` with `[[c, s], [-s, c]] (f, g)ᵀ = (r, 0)ᵀ`.
pub fn rot(f: f64, g: f64) -> (f64, f64, f64) {
    if f == 0.0 {
        (0.0, 1.0, g)
    } else if f.abs() > g.abs() {
        let t = g / f;
        let tt = t.hypot(1.0);
        let c = 1.0 / tt;
        (c, t * c, tt * f)
    } else {
        let t = f / g;
        let tt = t.hypot(1.0);
        let s = 1.0 / tt;
        (t * s, s, tt * g)
    }
}

/// Householder vector for `x`: with `H = I − 2uuᵀ/(uᵀu)`, `Hx = (σ, 0, …, 0)ᵀ`.
///
/// `u` is scaled by `1 / max|xᵢ|`, which leaves `H` unchanged.
pub fn houszero(x: &[f64]) -> Result<(Vec<f64>, f64)> {
    let m = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if x.is_empty() || m == 0.0 {
        return Err(Error::ZeroVector);
    }
    let mut u: Vec<f64> = x.iter().map(|v| v / m).collect();
    let mut sigma = sign(u[0]) * dot(&u, &u).sqrt();
    u[0] += sigma;
    sigma *= -m;
    Ok((u, sigma))
}

/// Prepared reflector `I − β u uᵀ` acting on a trailing index range.
#[derive(Debug, Clone)]
pub(crate) struct Reflector {
    pub u: Vec<f64>,
    pub beta: f64,
}

impl Reflector {
    /// Reflector mapping `x` onto `σ e₁`, or `None` when `x` already has
    /// that shape (trailing entries all zero).
    pub fn annihilating(x: &[f64]) -> Option<(Reflector, f64)> {
        if x.len() < 2 || x[1..].iter().all(|&v| v == 0.0) {
            return None;
        }
        let (u, sigma) = houszero(x).ok()?;
        let beta = 2.0 / dot(&u, &u);
        Some((Reflector { u, beta }, sigma))
    }

    /// `row ← row H` on `row[offset..offset+len]`.
    #[inline]
    pub fn apply_right(&self, row: &mut [f64], offset: usize) {
        let seg = &mut row[offset..offset + self.u.len()];
        let w = self.beta * dot(seg, &self.u);
        for (x, &ui) in seg.iter_mut().zip(&self.u) {
            *x -= w * ui;
        }
    }

    /// `M ← H M` where `M` is the row block `offset..` of a row-major buffer,
    /// restricted to columns `col0..`.
    pub fn apply_left(&self, data: &mut [f64], ld: usize, offset: usize, col0: usize) {
        let width = ld - col0;
        let mut w = vec![0.0; width];
        for (k, &ui) in self.u.iter().enumerate() {
            let r = &data[(offset + k) * ld + col0..(offset + k + 1) * ld];
            for (wj, &x) in w.iter_mut().zip(r) {
                *wj += ui * x;
            }
        }
        for (k, &ui) in self.u.iter().enumerate() {
            let f = self.beta * ui;
            let r = &mut data[(offset + k) * ld + col0..(offset + k + 1) * ld];
            for (x, &wj) in r.iter_mut().zip(&w) {
                *x -= f * wj;
            }
        }
    }
}

/// Rotates a pair of rows: `(x, y) ← (c x − s y, s x + c y)`.
#[inline]
pub(crate) fn rotate_rows(x: &mut [f64], y: &mut [f64], c: f64, s: f64) {
    for (a, b) in x.iter_mut().zip(y.iter_mut()) {
        let (p, q) = (*a, *b);
        *a = c * p - s * q;
        *b = s * p + c * q;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{orth_tol, DenseMatrix};
    use proptest::prelude::*;

    const EPS: f64 = f64::EPSILON;

    fn apply_gt(c: f64, s: f64, a: f64, b: f64) -> (f64, f64) {
        // Gᵀ = [[c, -s], [s, c]]
        (c * a - s * b, s * a + c * b)
    }

    fn householder_matrix(u: &[f64]) -> DenseMatrix {
        let n = u.len();
        let uu = dot(u, u);
        let mut h = DenseMatrix::identity(n);
        for i in 0..n {
            for j in 0..n {
                h[(i, j)] -= 2.0 * u[i] * u[j] / uu;
            }
        }
        h
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
        let (r, z) = apply_gt(c, s, 0.0, 1.0);
        assert_eq!(r.abs(), 1.0);
        assert_eq!(z, 0.0);
    }

    #[test]
    fn givens_three_four() {
        let (c, s) = givens(3.0, 4.0);
        assert!((c * c + s * s - 1.0).abs() <= 4.0 * EPS);
        let (r, z) = apply_gt(c, s, 3.0, 4.0);
        assert!(z.abs() <= 8.0 * EPS * 5.0);
        assert!((r.abs() - 5.0).abs() <= 8.0 * EPS * 5.0);
    }

    #[test]
    fn rot_branches() {
        assert_eq!(rot(0.0, 7.0), (0.0, 1.0, 7.0));
        assert_eq!(rot(1.0, 0.0), (1.0, 0.0, 1.0));
        let (c, s, r) = rot(3.0, 4.0);
        assert!((r.abs() - 5.0).abs() <= 8.0 * EPS * 5.0);
        assert!((-s * 3.0 + c * 4.0).abs() <= 8.0 * EPS * 5.0);
        assert!((c * 3.0 + s * 4.0 - r).abs() <= 8.0 * EPS * 5.0);
    }

    #[test]
    fn houszero_aligned_vector() {
        let x = [1.0, 0.0, 0.0];
        let (u, sigma) = houszero(&x).unwrap();
        let hx = householder_matrix(&u).matvec(&x).unwrap();
        assert_eq!(hx[1], 0.0);
        assert_eq!(hx[2], 0.0);
        assert!((hx[0].abs() - 1.0).abs() <= 8.0 * 3.0 * EPS);
        assert!((hx[0] - sigma).abs() <= 8.0 * 3.0 * EPS);
    }

    #[test]
    fn houszero_three_four() {
        let x = [3.0, 4.0];
        let (u, sigma) = houszero(&x).unwrap();
        let hx = householder_matrix(&u).matvec(&x).unwrap();
        assert!((hx[0].abs() - 5.0).abs() <= 8.0 * 2.0 * EPS * 5.0);
        assert!(hx[1].abs() <= 8.0 * 2.0 * EPS * 5.0);
        // sign(x₁) = +1, so σ is negated to −‖x‖.
        assert!((sigma + 5.0).abs() <= 8.0 * 2.0 * EPS * 5.0);
    }

    #[test]
    fn houszero_ones() {
        let x = [1.0, 1.0, 1.0, 1.0];
        let (u, sigma) = houszero(&x).unwrap();
        let hx = householder_matrix(&u).matvec(&x).unwrap();
        assert!((sigma.abs() - 2.0).abs() <= 8.0 * 4.0 * EPS * 2.0);
        assert!((hx[0] - sigma).abs() <= 8.0 * 4.0 * EPS * 2.0);
        for v in &hx[1..] {
            assert!(v.abs() <= 8.0 * 4.0 * EPS * 2.0);
        }
    }

    #[test]
    fn houszero_zero_vector() {
        assert_eq!(houszero(&[0.0, 0.0]), Err(Error::ZeroVector));
        assert_eq!(houszero(&[]), Err(Error::ZeroVector));
    }

    proptest! {
        #[test]
        fn givens_postcondition(a in -1e3f64..1e3, b in -1e3f64..1e3) {
            let (c, s) = givens(a, b);
            prop_assert!((c * c + s * s - 1.0).abs() <= 4.0 * EPS);
            let (r, z) = apply_gt(c, s, a, b);
            let norm = a.hypot(b);
            prop_assert!(z.abs() <= 8.0 * EPS * norm.max(f64::MIN_POSITIVE));
            prop_assert!((r.abs() - norm).abs() <= 8.0 * EPS * norm);
        }

        #[test]
        fn rot_postcondition(f in -1e3f64..1e3, g in -1e3f64..1e3) {
            let (c, s, r) = rot(f, g);
            prop_assert!((c * c + s * s - 1.0).abs() <= 4.0 * EPS);
            prop_assert!((c * f + s * g - r).abs() <= 8.0 * EPS * r.abs().max(f64::MIN_POSITIVE));
            prop_assert!((-s * f + c * g).abs() <= 8.0 * EPS * r.abs().max(f64::MIN_POSITIVE));
        }

        #[test]
        fn householder_is_orthogonal_involution(x in proptest::collection::vec(-10.0f64..10.0, 1..12)) {
            prop_assume!(x.iter().any(|v| *v != 0.0));
            let n = x.len();
            let (u, sigma) = houszero(&x).unwrap();
            let h = householder_matrix(&u);
            let hh = h.matmul(&h).unwrap();
            let id = DenseMatrix::identity(n);
            prop_assert!(hh.sub(&id).unwrap().max_abs() <= orth_tol(n));
            prop_assert!(h.orthogonality_defect() <= orth_tol(n));
            let hx = h.matvec(&x).unwrap();
            let nx = crate::matrix::norm2(&x);
            prop_assert!((hx[0] - sigma).abs() <= 8.0 * n as f64 * EPS * nx);
            prop_assert!((sigma.abs() - nx).abs() <= 8.0 * n as f64 * EPS * nx);
            for v in &hx[1..] {
                prop_assert!(v.abs() <= 8.0 * n as f64 * EPS * nx);
            }
        }
    }
}
