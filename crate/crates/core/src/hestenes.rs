//! One-sided (Hestenes) Jacobi: right rotations orthogonalize the columns of
//! `W = AV`; the column norms are the singular values and `U = WΣ⁻¹`.

use crate::error::{Error, Result, Stage};
use crate::matrix::{dot, norm2, sign, DenseMatrix, SvdResult, SymmetricMatrix};
use crate::svd::sort_svd;
use crate::transforms::rotate_rows;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HestenesConfig {
    /// Pairs with `|γ| ≤ tol · √(αβ)` count as orthogonal.
    pub tol: f64,
    pub max_sweeps: usize,
}

impl Default for HestenesConfig {
    fn default() -> Self {
        HestenesConfig { tol: 1e-12, max_sweeps: 30 }
    }
}

impl HestenesConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_sweeps == 0 {
            return Err(Error::Config(format!("invalid Hestenes config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct HestenesStats {
    pub sweeps: usize,
    pub rotations: usize,
    /// Largest normalized inner product `|⟨wₚ, w_q⟩| / (‖wₚ‖‖w_q‖)` at exit.
    pub max_normalized_inner: f64,
}

pub fn hestenes_svd(a: &SymmetricMatrix, cfg: &HestenesConfig) -> Result<SvdResult> {
    hestenes_svd_with_stats(a, cfg).map(|(s, _)| s)
}

pub fn hestenes_svd_with_stats(a: &SymmetricMatrix, cfg: &HestenesConfig) -> Result<(SvdResult, HestenesStats)> {
    cfg.validate()?;
    let n = a.order();
    // Row p of `wt` is column p of W = AV; A is symmetric so Wᵀ starts as A.
    let mut wt = a.as_dense().clone();
    let mut vt = DenseMatrix::identity(n);
    let mut stats = HestenesStats::default();
    // Columns below this squared norm are rounding noise; rotating them
    // against large columns cannot reduce the normalized inner product.
    let negligible = {
        let x = n as f64 * f64::EPSILON * a.frobenius_norm();
        x * x
    };

    loop {
        if stats.sweeps == cfg.max_sweeps {
            return Err(Error::NoConvergence { stage: Stage::Hestenes, detail: stats.sweeps });
        }
        let mut rotated = 0;
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let (wp, wq) = (wt.row(p), wt.row(q));
                let alpha = dot(wp, wp);
                let beta = dot(wq, wq);
                let gamma = dot(wp, wq);
                if gamma.abs() <= cfg.tol * (alpha * beta).sqrt() || alpha.min(beta) <= negligible {
                    continue;
                }
                let zeta = (beta - alpha) / (2.0 * gamma);
                // sign(0) = 1: equal column norms still need the 45° rotation.
                let t = sign(zeta) / (zeta.abs() + zeta.hypot(1.0));
                let c = 1.0 / t.hypot(1.0);
                let s = c * t;
                let (rp, rq) = wt.two_rows_mut(p, q);
                rotate_rows(rp, rq, c, s);
                let (rp, rq) = vt.two_rows_mut(p, q);
                rotate_rows(rp, rq, c, s);
                rotated += 1;
            }
        }
        stats.sweeps += 1;
        stats.rotations += rotated;
        if rotated == 0 {
            break;
        }
    }

    let sigma: Vec<f64> = (0..n).map(|p| norm2(wt.row(p))).collect();
    for p in 0..n {
        for q in (p + 1)..n {
            if sigma[p] > 0.0 && sigma[q] > 0.0 {
                let g = dot(wt.row(p), wt.row(q)).abs() / (sigma[p] * sigma[q]);
                stats.max_normalized_inner = stats.max_normalized_inner.max(g);
            }
        }
    }

    let sigma_max = sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = n as f64 * f64::EPSILON * sigma_max;
    // Uᵀ rows: wₚ/σₚ where that is defined, completed below otherwise.
    let mut ut = DenseMatrix::zeros(n, n);
    let mut missing = Vec::new();
    for (p, &s) in sigma.iter().enumerate() {
        if s > cutoff && s > 0.0 {
            for (x, &w) in ut.row_mut(p).iter_mut().zip(wt.row(p)) {
                *x = w / s;
            }
        } else {
            missing.push(p);
        }
    }
    complete_orthonormal_rows(&mut ut, &missing);

    let svd = sort_svd(ut.transpose(), sigma, vt.transpose());
    Ok((svd, stats))
}

/// Fills the listed rows of `m` with unit vectors orthogonal to every other
/// row. Each new row is the coordinate vector with the largest component
/// outside the rows filled so far.
pub(crate) fn complete_orthonormal_rows(m: &mut DenseMatrix, missing: &[usize]) {
    if missing.is_empty() {
        return;
    }
    let n = m.cols();
    let mut filled: Vec<usize> = (0..m.rows()).filter(|r| !missing.contains(r)).collect();
    let residual = |m: &DenseMatrix, filled: &[usize], mut v: Vec<f64>| {
        // Two passes of modified Gram–Schmidt.
        for _ in 0..2 {
            for &r in filled {
                let proj = dot(&v, m.row(r));
                for (x, &y) in v.iter_mut().zip(m.row(r)) {
                    *x -= proj * y;
                }
            }
        }
        v
    };
    for &target in missing {
        let mut best = Vec::new();
        let mut best_norm = -1.0;
        for c in 0..n {
            let mut e = vec![0.0; n];
            e[c] = 1.0;
            let v = residual(m, &filled, e);
            let nv = norm2(&v);
            if nv > best_norm {
                best = v;
                best_norm = nv;
            }
        }
        assert!(best_norm > 0.0, "no direction left to complete the basis");
        let v = residual(m, &filled, best.into_iter().map(|x| x / best_norm).collect());
        let nv = norm2(&v);
        for (x, &y) in m.row_mut(target).iter_mut().zip(&v) {
            *x = y / nv;
        }
        filled.push(target);
    }
}
