//! Divide and conquer for symmetric tridiagonal matrices.
//!
//! `T` is torn at its middle subdiagonal entry `ρ` into two halves plus the
//! rank-one term `ρvvᵀ`. Each half is solved recursively (QR below the
//! cutoff); the merge sorts the combined spectrum, deflates, solves the
//! secular equation for the rest and rotates the child eigenvectors.

use crate::deflation::deflate_in_place;
use crate::error::{Error, Result};
use crate::matrix::{gemm, DenseMatrix, EigResult, MatRef, SvdResult, SymmetricMatrix, TridiagonalMatrix};
use crate::par::{for_each_chunk, join, map_range, Parallelism};
use crate::permutation::Permutation;
use crate::secular::{corrected_weights, fill_eigenvector, solve_par, SecularProblem, SolveOptions, SolverScheme};
use crate::svd::svd_from_eig;
use crate::transforms::rotate_rows;
use crate::tridiag::{apply_q_to_rows, householder_factor, qr_iterate, sort_rows_ascending, QrConfig};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DcConfig {
    /// Blocks of this order or smaller go to the QR solver.
    pub cutoff: usize,
    pub scheme: SolverScheme,
    pub qr: QrConfig,
    pub parallelism: Parallelism,
}

impl Default for DcConfig {
    fn default() -> Self {
        DcConfig {
            cutoff: 25,
            scheme: SolverScheme::Hybrid,
            qr: QrConfig::default(),
            parallelism: Parallelism::available(),
        }
    }
}

impl DcConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff == 0 {
            return Err(Error::Config("divide-and-conquer cutoff must be at least 1".into()));
        }
        self.qr.validate()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DcStats {
    pub leaves: usize,
    pub merges: usize,
    pub deflated: usize,
    pub secular_roots: usize,
    pub secular_iterations: usize,
}

impl DcStats {
    fn absorb(&mut self, other: &DcStats) {
        self.leaves += other.leaves;
        self.merges += other.merges;
        self.deflated += other.deflated;
        self.secular_roots += other.secular_roots;
        self.secular_iterations += other.secular_iterations;
    }
}

/// `T = blkdiag(T₁, T₂) + ρvvᵀ` torn at the coupling between rows `m−1` and
/// `m` (0-based), with `v = e_{m−1} + e_m`.
pub fn split_rank_one(
    t: &TridiagonalMatrix,
    m: usize,
) -> Result<(TridiagonalMatrix, TridiagonalMatrix, f64, Vec<f64>)> {
    let n = t.order();
    if m == 0 || m >= n {
        return Err(Error::Dimension(format!("split point {m} outside 1..{n}")));
    }
    let rho = t.sub()[m - 1];
    if rho == 0.0 {
        return Err(Error::ZeroCoupling { index: m - 1 });
    }
    let (d, e) = (t.diag(), t.sub());
    let mut d1 = d[..m].to_vec();
    let mut d2 = d[m..].to_vec();
    d1[m - 1] -= rho;
    d2[0] -= rho;
    let t1 = TridiagonalMatrix::new(d1, e[..m - 1].to_vec())?;
    let t2 = TridiagonalMatrix::new(d2, e[m..].to_vec())?;
    let mut v = vec![0.0; n];
    v[m - 1] = 1.0;
    v[m] = 1.0;
    Ok((t1, t2, rho, v))
}

/// `u = (last row of Q₁, first row of Q₂)`, where the columns of `Qᵢ` are
/// the child eigenvectors.
pub fn build_merge_weights(q1: &DenseMatrix, q2: &DenseMatrix) -> Vec<f64> {
    let mut u = q1.row(q1.rows() - 1).to_vec();
    u.extend_from_slice(q2.row(0));
    u
}

pub fn dc_eig(t: &TridiagonalMatrix, cfg: &DcConfig) -> Result<EigResult> {
    dc_eig_with_stats(t, cfg).map(|(e, _)| e)
}

/// Eigenpairs sorted ascending.
pub fn dc_eig_with_stats(t: &TridiagonalMatrix, cfg: &DcConfig) -> Result<(EigResult, DcStats)> {
    cfg.validate()?;
    let (lambda, rows, stats) = solve(t.diag(), t.sub(), cfg)?;
    Ok((EigResult::from_rows(lambda, rows), stats))
}

pub fn dc_svd(a: &SymmetricMatrix, cfg: &DcConfig) -> Result<SvdResult> {
    cfg.validate()?;
    let (panels, t) = householder_factor(a);
    let (lambda, mut zt, _) = solve(t.diag(), t.sub(), cfg)?;
    // Rows of Zᵀ Qᵀ are the eigenvectors of A.
    apply_q_to_rows(&panels, &mut zt, GEMM_ROW_CHUNK, cfg.parallelism);
    Ok(svd_from_eig(&EigResult::from_rows(lambda, zt)))
}

/// Ascending eigenvalues and eigenvectors as rows.
fn solve(d: &[f64], e: &[f64], cfg: &DcConfig) -> Result<(Vec<f64>, DenseMatrix, DcStats)> {
    let n = d.len();
    if n <= cfg.cutoff {
        let (mut dd, mut ee) = (d.to_vec(), e.to_vec());
        let mut zt = DenseMatrix::identity(n);
        qr_iterate(&mut dd, &mut ee, &mut zt, &cfg.qr)?;
        let (lambda, rows) = sort_rows_ascending(dd, &zt);
        return Ok((lambda, rows, DcStats { leaves: 1, ..Default::default() }));
    }

    let m = n / 2;
    let rho = e[m - 1];
    let mut d1 = d[..m].to_vec();
    let mut d2 = d[m..].to_vec();
    d1[m - 1] -= rho;
    d2[0] -= rho;
    let (r1, r2) = join(cfg.parallelism, || solve(&d1, &e[..m - 1], cfg), || solve(&d2, &e[m..], cfg));
    let (l1, z1, s1) = r1?;
    let (l2, z2, s2) = r2?;
    let mut stats = s1;
    stats.absorb(&s2);

    if rho == 0.0 {
        let mut rows = DenseMatrix::zeros(n, n);
        for j in 0..m {
            rows.row_mut(j)[..m].copy_from_slice(z1.row(j));
        }
        for j in 0..n - m {
            rows.row_mut(m + j)[m..].copy_from_slice(z2.row(j));
        }
        let lambda: Vec<f64> = l1.into_iter().chain(l2).collect();
        let (lambda, rows) = sort_rows_ascending(lambda, &rows);
        return Ok((lambda, rows, stats));
    }

    let (lambda, rows, merge_stats) = merge(&l1, &z1, &l2, &z2, rho, cfg)?;
    stats.absorb(&merge_stats);
    Ok((lambda, rows, stats))
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Support {
    Upper,
    Lower,
    Mixed,
}

fn merge(
    l1: &[f64],
    z1: &DenseMatrix,
    l2: &[f64],
    z2: &DenseMatrix,
    rho: f64,
    cfg: &DcConfig,
) -> Result<(Vec<f64>, DenseMatrix, DcStats)> {
    let (n1, n2) = (l1.len(), l2.len());
    let n = n1 + n2;
    let mut stats = DcStats { merges: 1, ..Default::default() };

    let d: Vec<f64> = l1.iter().chain(l2).copied().collect();
    let u: Vec<f64> = (0..n1).map(|j| z1.row(j)[n1 - 1]).chain((0..n2).map(|j| z2.row(j)[0])).collect();
    let perm = Permutation::sorting(&d);
    let mut ds = perm.apply(&d)?;
    let mut us = perm.apply(&u)?;

    // Basis rows in sorted order: child eigenvectors padded to length n.
    let mut w = DenseMatrix::zeros(n, n);
    let mut support = Vec::with_capacity(n);
    for (r, &src) in perm.as_slice().iter().enumerate() {
        if src < n1 {
            w.row_mut(r)[..n1].copy_from_slice(z1.row(src));
            support.push(Support::Upper);
        } else {
            w.row_mut(r)[n1..].copy_from_slice(z2.row(src - n1));
            support.push(Support::Lower);
        }
    }

    let dtol = 8.0 * n as f64 * f64::EPSILON;
    let defl = deflate_in_place(&mut ds, &mut us, rho, dtol);
    for &(i, j, c, s) in &defl.rotations {
        let (x, y) = w.two_rows_mut(i, j);
        rotate_rows(x, y, c, s);
        if support[i] != support[j] {
            support[i] = Support::Mixed;
            support[j] = Support::Mixed;
        }
    }
    stats.deflated = defl.deflated.len();

    let k = defl.kept.len();
    let mut lambda = Vec::with_capacity(n);
    let mut out = DenseMatrix::zeros(n, n);
    if k > 0 {
        let problem = SecularProblem {
            d: defl.kept.iter().map(|&i| ds[i]).collect(),
            u: defl.kept.iter().map(|&i| us[i]).collect(),
            rho,
        };
        let opts = SolveOptions { scheme: cfg.scheme, ..Default::default() };
        let roots = solve_par(&problem, &opts, true, cfg.parallelism)?;
        stats.secular_roots = k;
        stats.secular_iterations = roots.iterations.iter().sum();
        let uhat = corrected_weights(&problem, &roots)?;

        // Yᵀ: row j is the eigenvector of the reduced problem for root j.
        let yrows = map_range(cfg.parallelism, k, |j| {
            let mut y = vec![0.0; k];
            fill_eigenvector(&problem.d, &uhat, &roots, j, &mut y);
            y
        });
        assemble(&yrows, &w, &defl.kept, &support, n1, cfg.parallelism, &mut out);
        lambda.extend_from_slice(&roots.lambda);
    }
    for (r, &(i, li)) in defl.deflated.iter().enumerate() {
        out.row_mut(k + r).copy_from_slice(w.row(i));
        lambda.push(li);
    }
    let (lambda, rows) = sort_rows_ascending(lambda, &out);
    Ok((lambda, rows, stats))
}

/// First `k` rows of `out` ← `Yᵀ W_kept`. Kept rows supported on one half
/// only contribute to that half's columns, so the product is split into a
/// left and a right GEMM over the relevant rows.
fn assemble(
    yrows: &[Vec<f64>],
    w: &DenseMatrix,
    kept: &[usize],
    support: &[Support],
    n1: usize,
    par: Parallelism,
    out: &mut DenseMatrix,
) {
    let k = kept.len();
    let n = w.cols();
    for (cols, want) in [(0..n1, Support::Upper), (n1..n, Support::Lower)] {
        let idx: Vec<usize> =
            (0..k).filter(|&i| matches!(support[kept[i]], s if s == want || s == Support::Mixed)).collect();
        let width = cols.len();
        if idx.is_empty() || width == 0 {
            continue;
        }
        let a = idx.len();
        let mut ya = vec![0.0; k * a];
        for (j, y) in yrows.iter().enumerate() {
            for (c, &i) in idx.iter().enumerate() {
                ya[j * a + c] = y[i];
            }
        }
        let mut wb = vec![0.0; a * width];
        for (r, &i) in idx.iter().enumerate() {
            wb[r * width..(r + 1) * width].copy_from_slice(&w.row(kept[i])[cols.clone()]);
        }
        let dst = &mut out.as_mut_slice()[cols.start..];
        let ya = MatRef { data: &ya, row_stride: a as isize, col_stride: 1 };
        let wb = MatRef { data: &wb, row_stride: width as isize, col_stride: 1 };
        parallel_gemm(par, k, a, width, ya, wb, dst, n);
    }
}

const GEMM_ROW_CHUNK: usize = 64;

/// `c ← a b` (`m×k` times `k×n`, `c` row-major with leading dimension
/// `ldc`), split into fixed row chunks so that the arithmetic is the same in
/// sequential and parallel mode.
#[allow(clippy::too_many_arguments)]
fn parallel_gemm(
    par: Parallelism,
    m: usize,
    k: usize,
    n: usize,
    a: MatRef<'_>,
    b: MatRef<'_>,
    c: &mut [f64],
    ldc: usize,
) {
    if m == 0 || n == 0 {
        return;
    }
    let rs = a.row_stride as usize;
    for_each_chunk(par, c, GEMM_ROW_CHUNK * ldc, |ci, chunk| {
        let row0 = ci * GEMM_ROW_CHUNK;
        if row0 >= m {
            return;
        }
        let rows = GEMM_ROW_CHUNK.min(m - row0);
        let a_part = MatRef { data: &a.data[row0 * rs..], ..a };
        gemm(rows, k, n, 1.0, a_part, b, 0.0, chunk, ldc);
    });
}
