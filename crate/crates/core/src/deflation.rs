//! Deflation of a sorted rank-one update `D + ρuuᵀ`: pairs that the update
//! leaves (numerically) unchanged are split off before the secular solve.

use crate::matrix::{norm2, DenseMatrix};
use crate::secular::SecularProblem;
use crate::transforms::rotate_rows;

/// Outcome of [`deflate`]. Indices refer to the input problem.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Deflation {
    /// Indices whose (possibly rotated) poles form the reduced problem.
    pub kept: Vec<usize>,
    /// `(index, eigenvalue)`; the eigenvector is column `index` of
    /// [`Deflation::basis`].
    pub deflated: Vec<(usize, f64)>,
    /// `(i, j, c, s)`: columns `i, j` of the basis replaced by
    /// `c eᵢ − s eⱼ` and `s eᵢ + c eⱼ`, which moves all of `uᵢ` into `uⱼ`.
    pub rotations: Vec<(usize, usize, f64, f64)>,
}

impl Deflation {
    /// Orthogonal `G` with `GᵀDG ≈ diag` on merged poles and `Gᵀu` zero on
    /// every merged-away index.
    pub fn basis(&self, n: usize) -> DenseMatrix {
        let mut gt = DenseMatrix::identity(n);
        for &(i, j, c, s) in &self.rotations {
            let (x, y) = gt.two_rows_mut(i, j);
            rotate_rows(x, y, c, s);
        }
        gt.transpose()
    }
}

/// Splits off eigenpairs of a problem with ascending poles.
///
/// * `|ρ|‖u‖² ≤ dtol·‖d‖∞`: everything deflates.
/// * `|ρ||uᵢ|‖u‖ ≤ dtol·(‖d‖∞ + |ρ|‖u‖²)`: pole `i` deflates with `λ = dᵢ`.
/// * `|dⱼ − dᵢ| ≤ dtol·‖d‖∞` for neighbouring kept poles: a rotation zeroes
///   `uᵢ` and pole `i` deflates.
pub fn deflate(p: &SecularProblem, dtol: f64) -> (SecularProblem, Deflation) {
    let mut d = p.d.clone();
    let mut u = p.u.clone();
    let defl = deflate_in_place(&mut d, &mut u, p.rho, dtol);
    let reduced = SecularProblem {
        d: defl.kept.iter().map(|&k| d[k]).collect(),
        u: defl.kept.iter().map(|&k| u[k]).collect(),
        rho: p.rho,
    };
    (reduced, defl)
}

/// As [`deflate`], updating `d` and `u` to the rotated values.
pub(crate) fn deflate_in_place(d: &mut [f64], u: &mut [f64], rho: f64, dtol: f64) -> Deflation {
    let n = d.len();
    let dnorm = d.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let unorm = norm2(u);
    let unorm2 = unorm * unorm;
    let mut out = Deflation::default();

    if rho.abs() * unorm2 <= dtol * dnorm {
        out.deflated = (0..n).map(|i| (i, d[i])).collect();
        return out;
    }

    let weight_tol = dtol * (dnorm + rho.abs() * unorm2);
    let mut prev: Option<usize> = None;
    for j in 0..n {
        if (rho * u[j]).abs() * unorm <= weight_tol {
            out.deflated.push((j, d[j]));
            continue;
        }
        if let Some(i) = prev {
            if d[j] - d[i] <= dtol * dnorm {
                let r = u[i].hypot(u[j]);
                let (c, s) = (u[j] / r, u[i] / r);
                let (di, dj) = (d[i], d[j]);
                d[i] = di * c * c + dj * s * s;
                d[j] = di * s * s + dj * c * c;
                u[i] = 0.0;
                u[j] = r;
                out.rotations.push((i, j, c, s));
                out.kept.pop();
                out.deflated.push((i, d[i]));
            }
        }
        out.kept.push(j);
        prev = Some(j);
    }
    out.deflated.sort_by_key(|&(i, _)| i);
    out
}
