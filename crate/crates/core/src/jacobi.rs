//! Two-sided (classical) cyclic Jacobi.
//!
//! Each step picks a pair `(j, k)`, builds the rotation that annihilates
//! `A(j, k)` and updates `A ← JᵀAJ`, `Q ← QJ`. Sweeps run cyclic-by-row. On
//! exit the diagonal holds the eigenvalues and the columns of `Q` the
//! eigenvectors; the SVD follows from `σₖ = |A(k, k)|`,
//! `vₖ = sign(A(k, k)) uₖ`.

use crate::error::{Error, Result, Stage};
use crate::matrix::{DenseMatrix, EigResult, SvdResult, SymmetricMatrix};
use crate::svd::svd_from_eig;
use crate::transforms::rotate_rows;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiConfig {
    /// Stop once `off(A) ≤ tol · ‖A‖_F`.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for JacobiConfig {
    fn default() -> Self {
        JacobiConfig { tol: f64::EPSILON, max_sweeps: 30 }
    }
}

impl JacobiConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_sweeps == 0 {
            return Err(Error::Config(format!("invalid Jacobi config {self:?}")));
        }
        Ok(())
    }
}

/// Per-sweep diagnostics. Index 0 is the input, index `k` the state after
/// sweep `k`.
#[derive(Debug, Clone, Default)]
pub struct JacobiStats {
    pub sweeps: usize,
    pub rotations: usize,
    pub off_norms: Vec<f64>,
    pub traces: Vec<f64>,
    pub frobenius: Vec<f64>,
    /// Largest `|A'(j, k)|` a rotation left behind before it was zeroed.
    pub max_rotation_residual: f64,
}

fn off_norm(a: &DenseMatrix) -> f64 {
    let n = a.rows();
    let mut s = 0.0;
    for i in 0..n {
        for (j, &x) in a.row(i).iter().enumerate() {
            if i != j {
                s += x * x;
            }
        }
    }
    s.sqrt()
}

pub fn jacobi_eig(a: &SymmetricMatrix, cfg: &JacobiConfig) -> Result<EigResult> {
    jacobi_eig_with_stats(a, cfg).map(|(e, _)| e)
}

/// Eigenpairs in diagonal order (unsorted) plus convergence diagnostics.
pub fn jacobi_eig_with_stats(a: &SymmetricMatrix, cfg: &JacobiConfig) -> Result<(EigResult, JacobiStats)> {
    cfg.validate()?;
    let n = a.order();
    let mut m = a.as_dense().clone();
    // Qᵀ: row i is eigenvector i.
    let mut qt = DenseMatrix::identity(n);
    let norm = m.frobenius_norm();
    let target = cfg.tol * norm;

    let mut stats = JacobiStats::default();
    let record = |m: &DenseMatrix, stats: &mut JacobiStats| {
        stats.off_norms.push(off_norm(m));
        stats.traces.push(m.trace());
        stats.frobenius.push(m.frobenius_norm());
    };
    record(&m, &mut stats);

    loop {
        if *stats.off_norms.last().unwrap() <= target {
            break;
        }
        if stats.sweeps == cfg.max_sweeps {
            return Err(Error::NoConvergence { stage: Stage::Jacobi, detail: stats.sweeps });
        }
        let mut rotated = 0;
        for j in 0..n.saturating_sub(1) {
            for k in (j + 1)..n {
                let ajk = m[(j, k)];
                let (ajj, akk) = (m[(j, j)], m[(k, k)]);
                if ajk.abs() <= f64::EPSILON * (ajj * akk).abs().sqrt() {
                    continue;
                }
                let xi = (akk - ajj) / (2.0 * ajk);
                let t = if xi == 0.0 { 1.0 } else { xi.signum() / (xi.abs() + xi.hypot(1.0)) };
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;

                let residual = c * s * (ajj - akk) + (c * c - s * s) * ajk;
                stats.max_rotation_residual = stats.max_rotation_residual.max(residual.abs());

                rotate_symmetric(&mut m, j, k, c, s, t);
                let (rj, rk) = qt.two_rows_mut(j, k);
                rotate_rows(rj, rk, c, s);
                rotated += 1;
            }
        }
        stats.sweeps += 1;
        stats.rotations += rotated;
        record(&m, &mut stats);
        if rotated == 0 {
            // Every remaining entry is below the rotation guard.
            break;
        }
    }

    let lambda = (0..n).map(|i| m[(i, i)]).collect();
    Ok((EigResult::from_rows(lambda, qt), stats))
}

/// `A ← JᵀAJ` for the rotation in plane `(j, k)`.
fn rotate_symmetric(m: &mut DenseMatrix, j: usize, k: usize, c: f64, s: f64, t: f64) {
    let n = m.rows();
    let ajk = m[(j, k)];
    for i in 0..n {
        if i == j || i == k {
            continue;
        }
        let (aij, aik) = (m[(i, j)], m[(i, k)]);
        let new_j = c * aij - s * aik;
        let new_k = s * aij + c * aik;
        m[(i, j)] = new_j;
        m[(j, i)] = new_j;
        m[(i, k)] = new_k;
        m[(k, i)] = new_k;
    }
    m[(j, j)] -= t * ajk;
    m[(k, k)] += t * ajk;
    m[(j, k)] = 0.0;
    m[(k, j)] = 0.0;
}

pub fn jacobi_svd(a: &SymmetricMatrix, cfg: &JacobiConfig) -> Result<SvdResult> {
    Ok(svd_from_eig(&jacobi_eig(a, cfg)?))
}
