//! Tridiagonal reduction and the shifted symmetric QR/QL iteration.

use crate::error::{Error, Result, Stage};
use crate::matrix::{dot, gemm, DenseMatrix, EigResult, MatRef, SvdResult, SymmetricMatrix, TridiagonalMatrix};
use crate::par::{for_each_chunk, Parallelism};
use crate::svd::svd_from_eig;
use crate::transforms::{givens, rotate_rows, Reflector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    #[default]
    Householder,
    Givens,
}

/// Which end of the active block the chase deflates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Orientation {
    /// QR when `|first diagonal| > |last diagonal|`, QL otherwise.
    #[default]
    Auto,
    QrOnly,
    QlOnly,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QrConfig {
    /// Split where `|e_i| ≤ tol · (|d_i| + |d_{i+1}|)`.
    pub tol: f64,
    pub max_iter_per_eig: usize,
    pub reduction: Reduction,
    pub orientation: Orientation,
}

impl Default for QrConfig {
    fn default() -> Self {
        QrConfig {
            tol: f64::EPSILON,
            max_iter_per_eig: 40,
            reduction: Reduction::Householder,
            orientation: Orientation::Auto,
        }
    }
}

impl QrConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) || self.max_iter_per_eig == 0 {
            return Err(Error::Config(format!("invalid QR config {self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default)]
pub struct QrStats {
    pub qr_sweeps: usize,
    pub ql_sweeps: usize,
    /// Largest change in the active block's trace over one sweep.
    pub trace_drift: f64,
}

/// `QᵀAQ = T` by Householder reflectors.
pub fn tridiagonalize(a: &SymmetricMatrix) -> (DenseMatrix, TridiagonalMatrix) {
    tridiagonalize_with(a, Reduction::Householder)
}

pub fn tridiagonalize_with(a: &SymmetricMatrix, reduction: Reduction) -> (DenseMatrix, TridiagonalMatrix) {
    let (qt, t) = tridiagonalize_transposed(a, reduction);
    (qt.transpose(), t)
}

/// Returns `Qᵀ` instead of `Q`.
pub(crate) fn tridiagonalize_transposed(a: &SymmetricMatrix, reduction: Reduction) -> (DenseMatrix, TridiagonalMatrix) {
    match reduction {
        Reduction::Householder => householder_reduce(a),
        Reduction::Givens => givens_reduce(a),
    }
}

/// Panel width of the blocked reduction.
const PANEL: usize = 32;

/// Blocked reduction: inside a panel the reflectors `uⱼ` and their update
/// vectors `wⱼ` are collected and the trailing block sees them only as the
/// rank-2 corrections `−VWᵀ − WVᵀ`, applied by two GEMMs once per panel.
fn householder_reduce(a: &SymmetricMatrix) -> (DenseMatrix, TridiagonalMatrix) {
    let (panels, t) = householder_factor(a);
    (accumulate_q(a.order(), &panels).transpose(), t)
}

/// The blocked reduction with `Q` left in factored form.
pub(crate) fn householder_factor(a: &SymmetricMatrix) -> (Vec<WyPanel>, TridiagonalMatrix) {
    let n = a.order();
    let mut m = a.as_dense().clone();
    let nr = n.saturating_sub(2);
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(nr);
    let mut diag = vec![0.0; n];
    let mut sub = vec![0.0; n.saturating_sub(1)];

    let mut k0 = 0;
    while k0 < nr {
        let nb = PANEL.min(nr - k0);
        // Row `i` of `v` and `w` is global row `k0 + 1 + i`.
        let rows = n - k0 - 1;
        let mut v = vec![0.0; rows * nb];
        let mut w = vec![0.0; rows * nb];
        for j in 0..nb {
            let c = k0 + j;
            let mut col = m.row(c)[c..].to_vec();
            if j > 0 {
                let (vc, wc) = (&v[(j - 1) * nb..][..j], &w[(j - 1) * nb..][..j]);
                for (i, x) in col.iter_mut().enumerate() {
                    let r = (j - 1 + i) * nb;
                    *x -= dot(&v[r..r + j], wc) + dot(&w[r..r + j], vc);
                }
            }
            diag[c] = col[0];
            let x = &col[1..];
            let (u, beta) = match Reflector::annihilating(x) {
                Some((h, sigma)) => {
                    sub[c] = sigma;
                    (h.u, h.beta)
                }
                None => {
                    sub[c] = x[0];
                    let mut u = vec![0.0; x.len()];
                    u[0] = 1.0;
                    (u, 0.0)
                }
            };
            let r = u.len();
            let mut p = vec![0.0; r];
            if beta != 0.0 {
                // Lower triangle only: each row feeds a dot and an axpy.
                for i in 0..r {
                    let row = &m.row(c + 1 + i)[c + 1..c + 2 + i];
                    let ui = u[i];
                    let (head, tail) = p.split_at_mut(i);
                    tail[0] = dot(&row[..i], &u[..i]) + row[i] * ui;
                    for (pj, &a) in head.iter_mut().zip(&row[..i]) {
                        *pj += a * ui;
                    }
                }
                if j > 0 {
                    let mut wtu = vec![0.0; j];
                    let mut vtu = vec![0.0; j];
                    for (i, &ui) in u.iter().enumerate() {
                        let row = (j + i) * nb;
                        for l in 0..j {
                            wtu[l] += w[row + l] * ui;
                            vtu[l] += v[row + l] * ui;
                        }
                    }
                    for (i, pi) in p.iter_mut().enumerate() {
                        let row = (j + i) * nb;
                        *pi -= dot(&v[row..row + j], &wtu) + dot(&w[row..row + j], &vtu);
                    }
                }
                for pi in p.iter_mut() {
                    *pi *= beta;
                }
                let kk = 0.5 * beta * dot(&u, &p);
                for (pi, &ui) in p.iter_mut().zip(&u) {
                    *pi -= kk * ui;
                }
            }
            for i in 0..r {
                v[(j + i) * nb + j] = u[i];
                w[(j + i) * nb + j] = p[i];
            }
            reflectors.push((u, beta));
        }
        let t0 = k0 + nb;
        let tr = n - t0;
        let lt = nb - 1;
        let vt = MatRef::offset(&v, nb, lt, 0);
        let wt = MatRef::offset(&w, nb, lt, 0);
        let dst = &mut m.as_mut_slice()[t0 * n + t0..];
        gemm(tr, nb, tr, -1.0, vt, wt.t(), 1.0, dst, n);
        gemm(tr, nb, tr, -1.0, wt, vt.t(), 1.0, dst, n);
        k0 += nb;
    }
    if n >= 2 {
        diag[n - 2] = m[(n - 2, n - 2)];
        sub[n - 2] = m[(n - 1, n - 2)];
    }
    diag[n - 1] = m[(n - 1, n - 1)];

    (wy_panels(n, &reflectors), TridiagonalMatrix::new(diag, sub).expect("finite input"))
}

/// `H_{k0}⋯H_{k0+nb−1} = I − YTYᵀ` with upper triangular `T`; `Y` has
/// `rows` rows, the first one being global row `off`.
pub(crate) struct WyPanel {
    off: usize,
    rows: usize,
    nb: usize,
    y: Vec<f64>,
    t: Vec<f64>,
}

impl WyPanel {
    fn y(&self) -> MatRef<'_> {
        MatRef { data: &self.y, row_stride: self.nb as isize, col_stride: 1 }
    }
}

fn wy_panels(n: usize, reflectors: &[(Vec<f64>, f64)]) -> Vec<WyPanel> {
    let nr = reflectors.len();
    (0..nr)
        .step_by(PANEL)
        .map(|k0| {
            let nb = PANEL.min(nr - k0);
            let rows = n - k0 - 1;
            let mut y = vec![0.0; rows * nb];
            for (j, (u, _)) in reflectors[k0..k0 + nb].iter().enumerate() {
                for (i, &ui) in u.iter().enumerate() {
                    y[(j + i) * nb + j] = ui;
                }
            }
            let mut t = vec![0.0; nb * nb];
            for j in 0..nb {
                let beta = reflectors[k0 + j].1;
                t[j * nb + j] = beta;
                if j == 0 || beta == 0.0 {
                    continue;
                }
                let mut z = vec![0.0; j];
                for i in j..rows {
                    let row = &y[i * nb..i * nb + nb];
                    for l in 0..j {
                        z[l] += row[l] * row[j];
                    }
                }
                for l in 0..j {
                    t[l * nb + j] = -beta * (l..j).map(|m| t[l * nb + m] * z[m]).sum::<f64>();
                }
            }
            WyPanel { off: k0 + 1, rows, nb, y, t }
        })
        .collect()
}

/// `Q = H₀H₁⋯` built backwards one panel at a time. Columns left of a
/// panel's offset are still those of `I` when it is applied, so it only
/// touches the trailing block.
fn accumulate_q(n: usize, panels: &[WyPanel]) -> DenseMatrix {
    let mut q = DenseMatrix::identity(n);
    for p in panels.iter().rev() {
        let (off, rows, nb, t) = (p.off, p.rows, p.nb, &p.t);
        let width = n - off;
        let mut ytq = vec![0.0; nb * width];
        gemm(nb, rows, width, 1.0, p.y().t(), MatRef::offset(q.as_slice(), n, off, off), 0.0, &mut ytq, width);
        for l in 0..nb {
            let d = t[l * nb + l];
            for x in &mut ytq[l * width..(l + 1) * width] {
                *x *= d;
            }
            for m in (l + 1)..nb {
                let f = t[l * nb + m];
                if f != 0.0 {
                    let (head, tail) = ytq.split_at_mut(m * width);
                    for (x, &y) in head[l * width..(l + 1) * width].iter_mut().zip(&tail[..width]) {
                        *x += f * y;
                    }
                }
            }
        }
        let tq = MatRef { data: &ytq, row_stride: width as isize, col_stride: 1 };
        gemm(rows, nb, width, -1.0, p.y(), tq, 1.0, &mut q.as_mut_slice()[off * n + off..], n);
    }
    q
}

/// Replaces every row `z` of `zt` by `(Qz)ᵀ`, i.e. `Zᵀ ← ZᵀQᵀ`, without
/// forming `Q`. Row blocks of `chunk` rows are independent.
pub(crate) fn apply_q_to_rows(panels: &[WyPanel], zt: &mut DenseMatrix, chunk: usize, par: Parallelism) {
    let n = zt.cols();
    for_each_chunk(par, zt.as_mut_slice(), chunk * n, |_, block| {
        let r = block.len() / n;
        let mut w = Vec::new();
        // ZᵀQᵀ = Zᵀ·Pₗₐₛₜᵀ⋯P₀ᵀ with Pᵀ = I − YTᵀYᵀ.
        for p in panels.iter().rev() {
            let (off, nb) = (p.off, p.nb);
            w.clear();
            w.resize(r * nb, 0.0);
            gemm(r, p.rows, nb, 1.0, MatRef::offset(block, n, 0, off), p.y(), 0.0, &mut w, nb);
            for row in w.chunks_exact_mut(nb) {
                for l in 0..nb {
                    row[l] = (l..nb).map(|m| row[m] * p.t[l * nb + m]).sum();
                }
            }
            let wr = MatRef { data: &w, row_stride: nb as isize, col_stride: 1 };
            gemm(r, nb, p.rows, -1.0, wr, p.y().t(), 1.0, &mut block[off..], n);
        }
    });
}

fn givens_reduce(a: &SymmetricMatrix) -> (DenseMatrix, TridiagonalMatrix) {
    let n = a.order();
    let mut m = a.as_dense().clone();
    let mut qt = DenseMatrix::identity(n);
    for k in 0..n.saturating_sub(2) {
        for i in (k + 2)..n {
            if m[(i, k)] == 0.0 {
                continue;
            }
            let (c, s) = givens(m[(k + 1, k)], m[(i, k)]);
            let (x, y) = m.two_rows_mut(k + 1, i);
            rotate_rows(x, y, c, s);
            for r in 0..n {
                let (p, q) = (m[(r, k + 1)], m[(r, i)]);
                m[(r, k + 1)] = c * p - s * q;
                m[(r, i)] = s * p + c * q;
            }
            m[(i, k)] = 0.0;
            m[(k, i)] = 0.0;
            let (x, y) = qt.two_rows_mut(k + 1, i);
            rotate_rows(x, y, c, s);
        }
    }
    let diag = (0..n).map(|i| m[(i, i)]).collect();
    let sub = (0..n.saturating_sub(1)).map(|i| m[(i + 1, i)]).collect();
    (qt, TridiagonalMatrix::new(diag, sub).expect("finite input"))
}

/// Eigenvalue of the trailing 2×2 block of `t` closer to its last diagonal.
pub fn wilkinson_shift(t: &TridiagonalMatrix) -> f64 {
    let n = t.order();
    assert!(n >= 2, "Wilkinson shift needs a 2×2 trailing block");
    wilkinson(t.diag()[n - 2], t.sub()[n - 2], t.diag()[n - 1])
}

/// Shift for `[[a, b], [b, c]]`, nearest to `c`.
fn wilkinson(a: f64, b: f64, c: f64) -> f64 {
    if b == 0.0 {
        return c;
    }
    let d = (a - c) / 2.0;
    let sd = if d < 0.0 { -1.0 } else { 1.0 };
    c - b * b / (d + sd * d.hypot(b))
}

pub fn symmetric_qr_eig(t: &TridiagonalMatrix, cfg: &QrConfig) -> Result<EigResult> {
    symmetric_qr_eig_with_stats(t, cfg).map(|(e, _)| e)
}

/// Eigenpairs sorted ascending.
pub fn symmetric_qr_eig_with_stats(t: &TridiagonalMatrix, cfg: &QrConfig) -> Result<(EigResult, QrStats)> {
    cfg.validate()?;
    let (mut d, mut e) = t.clone().into_parts();
    let mut zt = DenseMatrix::identity(t.order());
    let stats = qr_iterate(&mut d, &mut e, &mut zt, cfg)?;
    let (lambda, rows) = sort_rows_ascending(d, &zt);
    Ok((EigResult::from_rows(lambda, rows), stats))
}

pub fn tridiag_qr_svd(a: &SymmetricMatrix, cfg: &QrConfig) -> Result<SvdResult> {
    cfg.validate()?;
    let (mut qt, t) = tridiagonalize_transposed(a, cfg.reduction);
    let (mut d, mut e) = t.into_parts();
    // Rotations land directly on Qᵀ, so its rows end up as (QZ)ᵀ.
    qr_iterate(&mut d, &mut e, &mut qt, cfg)?;
    let (lambda, rows) = sort_rows_ascending(d, &qt);
    Ok(svd_from_eig(&EigResult::from_rows(lambda, rows)))
}

pub(crate) fn sort_rows_ascending(lambda: Vec<f64>, rows: &DenseMatrix) -> (Vec<f64>, DenseMatrix) {
    let mut idx: Vec<usize> = (0..lambda.len()).collect();
    idx.sort_by(|&a, &b| lambda[a].total_cmp(&lambda[b]));
    (idx.iter().map(|&i| lambda[i]).collect(), rows.select_rows(&idx))
}

/// Diagonalizes `(d, e)` in place. Every rotation `G` in plane `(i, i+1)` is
/// also applied as `Zᵀ ← GᵀZᵀ` to rows `i, i+1` of `zt`.
pub(crate) fn qr_iterate(d: &mut [f64], e: &mut [f64], zt: &mut DenseMatrix, cfg: &QrConfig) -> Result<QrStats> {
    let mut stats = QrStats::default();
    let mut current = None;
    let mut iters = 0;
    loop {
        for i in 0..e.len() {
            if e[i].abs() <= cfg.tol * (d[i].abs() + d[i + 1].abs()) {
                e[i] = 0.0;
            }
        }
        let Some((lo, hi)) = crate::golub_kahan::active_block(e) else { break };
        if current != Some((lo, hi)) {
            current = Some((lo, hi));
            iters = 0;
        }
        if iters == cfg.max_iter_per_eig {
            return Err(Error::NoConvergence { stage: Stage::TridiagonalQr, detail: hi });
        }
        let reversed = match cfg.orientation {
            Orientation::Auto => d[lo].abs() <= d[hi].abs(),
            Orientation::QrOnly => false,
            Orientation::QlOnly => true,
        };
        let before = d[lo..=hi].to_vec();
        chase(d, e, lo, hi, reversed, zt);
        let drift = compensated_sum(d[lo..=hi].iter().copied().chain(before.iter().map(|x| -x)));
        stats.trace_drift = stats.trace_drift.max(drift.abs());
        if reversed {
            stats.ql_sweeps += 1;
        } else {
            stats.qr_sweeps += 1;
        }
        iters += 1;
    }
    Ok(stats)
}

/// One implicit Wilkinson-shifted sweep over `[lo, hi]`. With `reversed`
/// the block is traversed bottom-up, which is the QL variant.
/// Neumaier summation, so the measured drift is not dominated by the
/// rounding of the measurement itself.
fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let t = s + x;
        c += if s.abs() >= x.abs() { (s - t) + x } else { (x - t) + s };
        s = t;
    }
    s + c
}

fn chase(d: &mut [f64], e: &mut [f64], lo: usize, hi: usize, reversed: bool, zt: &mut DenseMatrix) {
    let m = hi - lo;
    // Virtual index v ∈ [0, m] maps to a physical row; off(v) couples v, v+1.
    let idx = |v: usize| if reversed { hi - v } else { lo + v };
    let off = |v: usize| if reversed { hi - v - 1 } else { lo + v };

    let mu = wilkinson(d[idx(m - 1)], e[off(m - 1)], d[idx(m)]);
    let mut x = d[idx(0)] - mu;
    let mut z = e[off(0)];
    for k in 0..m {
        let (c, s) = givens(x, z);
        if k > 0 {
            e[off(k - 1)] = c * x - s * z;
        }
        let (a, b, a2) = (d[idx(k)], e[off(k)], d[idx(k + 1)]);
        let (cc, ss, cs) = (c * c, s * s, c * s);
        d[idx(k)] = a * cc - 2.0 * b * cs + a2 * ss;
        d[idx(k + 1)] = a * ss + 2.0 * b * cs + a2 * cc;
        e[off(k)] = (a - a2) * cs + b * (cc - ss);
        let (x_row, y_row) = zt.two_rows_mut(idx(k), idx(k + 1));
        rotate_rows(x_row, y_row, c, s);
        if k + 1 < m {
            z = -s * e[off(k + 1)];
            e[off(k + 1)] *= c;
            x = e[off(k)];
        }
    }
}
