//! Dense storage for the matrices every solver consumes and produces.
//!
//! Everything is row-major `f64`. Symmetric inputs are stored in full; the
//! solvers that accumulate orthogonal factors keep them transposed internally
//! so that plane rotations touch contiguous rows.

use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Orthogonality tolerance `64 * n * eps` used by every orthogonality claim.
pub fn orth_tol(n: usize) -> f64 {
    64.0 * n.max(1) as f64 * f64::EPSILON
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::LengthMismatch { expected: rows * cols, found: data.len() });
        }
        if data.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(DenseMatrix { rows, cols, data })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            if r.len() != cols {
                return Err(Error::LengthMismatch { expected: cols, found: r.len() });
            }
            data.extend_from_slice(r);
        }
        Self::from_vec(rows.len(), cols, data)
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<f64>]) -> Result<Self> {
        let rows = cols.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols.len());
        for (j, c) in cols.iter().enumerate() {
            if c.len() != rows {
                return Err(Error::LengthMismatch { expected: rows, found: c.len() });
            }
            for (i, &x) in c.iter().enumerate() {
                m[(i, j)] = x;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Mutable access to two distinct rows at once.
    pub fn two_rows_mut(&mut self, i: usize, j: usize) -> (&mut [f64], &mut [f64]) {
        assert!(i != j);
        let c = self.cols;
        if i < j {
            let (a, b) = self.data.split_at_mut(j * c);
            (&mut a[i * c..(i + 1) * c], &mut b[..c])
        } else {
            let (a, b) = self.data.split_at_mut(i * c);
            (&mut b[..c], &mut a[j * c..(j + 1) * c])
        }
    }

    pub fn col(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn set_col(&mut self, j: usize, v: &[f64]) {
        for (i, &x) in v.iter().enumerate() {
            self[(i, j)] = x;
        }
    }

    pub fn transpose(&self) -> DenseMatrix {
        let mut t = DenseMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    /// `self * other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.rows, other.cols);
        gemm(
            self.rows,
            self.cols,
            other.cols,
            1.0,
            MatRef::full(self),
            MatRef::full(other),
            0.0,
            &mut out.data,
            other.cols,
        );
        Ok(out)
    }

    /// `selfᵀ * other` without materialising the transpose.
    pub fn t_matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply ({}x{})ᵀ by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.cols, other.cols);
        gemm(
            self.cols,
            self.rows,
            other.cols,
            1.0,
            MatRef::full(self).t(),
            MatRef::full(other),
            0.0,
            &mut out.data,
            other.cols,
        );
        Ok(out)
    }

    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::LengthMismatch { expected: self.cols, found: x.len() });
        }
        Ok((0..self.rows).map(|i| dot(self.row(i), x)).collect())
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("shape mismatch in subtraction".into()));
        }
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Ok(DenseMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn frobenius_norm(&self) -> f64 {
        norm2(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// `max |(selfᵀ self − I)_ij|`.
    pub fn orthogonality_defect(&self) -> f64 {
        let g = self.t_matmul(self).expect("shapes agree");
        let mut worst = 0.0f64;
        for i in 0..g.rows {
            for j in 0..g.cols {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g[(i, j)] - target).abs());
            }
        }
        worst
    }

    /// Keeps the listed columns, in order.
    pub fn select_columns(&self, cols: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            let src = self.row(i);
            let dst = out.row_mut(i);
            for (k, &j) in cols.iter().enumerate() {
                dst[k] = src[j];
            }
        }
        out
    }

    /// Reorders rows so that row `k` of the result is row `rows[k]` of `self`.
    pub fn select_rows(&self, rows: &[usize]) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(rows.len(), self.cols);
        for (k, &i) in rows.iter().enumerate() {
            out.row_mut(k).copy_from_slice(self.row(i));
        }
        out
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

/// Strided read-only view handed to the GEMM kernel.
#[derive(Clone, Copy)]
pub(crate) struct MatRef<'a> {
    pub data: &'a [f64],
    pub row_stride: isize,
    pub col_stride: isize,
}

impl<'a> MatRef<'a> {
    pub fn full(m: &'a DenseMatrix) -> Self {
        MatRef { data: &m.data, row_stride: m.cols as isize, col_stride: 1 }
    }

    /// View starting at `(row, col)` of a row-major buffer with `ld` columns.
    pub fn offset(data: &'a [f64], ld: usize, row: usize, col: usize) -> Self {
        MatRef { data: &data[row * ld + col..], row_stride: ld as isize, col_stride: 1 }
    }

    pub fn t(self) -> Self {
        MatRef { data: self.data, row_stride: self.col_stride, col_stride: self.row_stride }
    }
}

/// `c = alpha * a * b + beta * c` where `a` is m×k, `b` is k×n and `c` is a
/// row-major buffer with leading dimension `ldc`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn gemm(
    m: usize,
    k: usize,
    n: usize,
    alpha: f64,
    a: MatRef<'_>,
    b: MatRef<'_>,
    beta: f64,
    c: &mut [f64],
    ldc: usize,
) {
    if m == 0 || n == 0 {
        return;
    }
    if k > 0 {
        let last_a = (m - 1) as isize * a.row_stride + (k - 1) as isize * a.col_stride;
        let last_b = (k - 1) as isize * b.row_stride + (n - 1) as isize * b.col_stride;
        assert!(last_a >= 0 && (last_a as usize) < a.data.len());
        assert!(last_b >= 0 && (last_b as usize) < b.data.len());
    }
    assert!((m - 1) * ldc + n <= c.len());
    // SAFETY: the assertions above keep every index the kernel touches
    // inside the three slices, and `c` is borrowed mutably so it cannot alias
    // `a` or `b`.
    unsafe {
        matrixmultiply::dgemm(
            m,
            k,
            n,
            alpha,
            a.data.as_ptr(),
            a.row_stride,
            a.col_stride,
            b.data.as_ptr(),
            b.row_stride,
            b.col_stride,
            beta,
            c.as_mut_ptr(),
            ldc as isize,
            1,
        );
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Euclidean norm with scaling against overflow.
pub fn norm2(v: &[f64]) -> f64 {
    let scale = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let ss: f64 = v.iter().map(|x| (x / scale) * (x / scale)).sum();
    scale * ss.sqrt()
}

/// `sign` with the `sign(0) = 1` convention used throughout.
#[inline]
pub fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Dense real symmetric matrix. Symmetry is checked, never repaired.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DenseMatrix);

impl SymmetricMatrix {
    pub fn new(m: DenseMatrix) -> Result<Self> {
        if !m.is_square() || m.rows() == 0 {
            return Err(Error::Dimension(format!(
                "symmetric matrix must be square and non-empty, got {}x{}",
                m.rows(),
                m.cols()
            )));
        }
        if m.as_slice().iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = m.rows();
        let mut asym = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                asym = asym.max((m[(i, j)] - m[(j, i)]).abs());
            }
        }
        if asym > 1e-12 * m.max_abs() {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        Ok(SymmetricMatrix(m))
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(DenseMatrix::from_rows(rows)?)
    }

    pub fn identity(n: usize) -> Self {
        SymmetricMatrix(DenseMatrix::identity(n))
    }

    pub fn order(&self) -> usize {
        self.0.rows()
    }

    pub fn as_dense(&self) -> &DenseMatrix {
        &self.0
    }

    pub fn into_dense(self) -> DenseMatrix {
        self.0
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.0.frobenius_norm()
    }
}

impl Index<(usize, usize)> for SymmetricMatrix {
    type Output = f64;

    fn index(&self, idx: (usize, usize)) -> &f64 {
        &self.0[idx]
    }
}

/// Symmetric tridiagonal matrix stored as its diagonal and subdiagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalMatrix {
    diag: Vec<f64>,
    sub: Vec<f64>,
}

impl TridiagonalMatrix {
    pub fn new(diag: Vec<f64>, sub: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::Dimension("tridiagonal matrix must be non-empty".into()));
        }
        if sub.len() + 1 != diag.len() {
            return Err(Error::LengthMismatch { expected: diag.len() - 1, found: sub.len() });
        }
        if diag.iter().chain(&sub).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(TridiagonalMatrix { diag, sub })
    }

    pub fn order(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn sub(&self) -> &[f64] {
        &self.sub
    }

    pub fn into_parts(self) -> (Vec<f64>, Vec<f64>) {
        (self.diag, self.sub)
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.order();
        let mut m = DenseMatrix::from_diag(&self.diag);
        for (i, &b) in self.sub.iter().enumerate() {
            m[(i + 1, i)] = b;
            m[(i, i + 1)] = b;
        }
        debug_assert_eq!(m.rows(), n);
        m
    }

    pub fn to_symmetric(&self) -> SymmetricMatrix {
        SymmetricMatrix(self.to_dense())
    }

    pub fn frobenius_norm(&self) -> f64 {
        let d = norm2(&self.diag);
        let s = norm2(&self.sub);
        (d * d + 2.0 * s * s).sqrt()
    }
}

/// `A = U Σ Vᵀ` with `sigma` non-increasing and non-negative.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdResult {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
}

impl SvdResult {
    pub fn reconstruct(&self) -> DenseMatrix {
        let mut us = self.u.clone();
        for i in 0..us.rows() {
            for (x, s) in us.row_mut(i).iter_mut().zip(&self.sigma) {
                *x *= s;
            }
        }
        let mut out = DenseMatrix::zeros(us.rows(), self.v.rows());
        gemm(
            us.rows(),
            us.cols(),
            self.v.rows(),
            1.0,
            MatRef::full(&us),
            MatRef::full(&self.v).t(),
            0.0,
            out.as_mut_slice(),
            self.v.rows(),
        );
        out
    }

    /// `‖A − UΣVᵀ‖_F / ‖A‖_F` (absolute when `A = 0`).
    pub fn relative_residual(&self, a: &SymmetricMatrix) -> f64 {
        let r = a.as_dense().sub(&self.reconstruct()).expect("same shape").frobenius_norm();
        let na = a.frobenius_norm();
        if na == 0.0 {
            r
        } else {
            r / na
        }
    }

    pub fn orthogonality_defect(&self) -> f64 {
        self.u.orthogonality_defect().max(self.v.orthogonality_defect())
    }
}

/// `A = X Λ Xᵀ`; eigenvectors are the columns of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigResult {
    pub x: DenseMatrix,
    pub lambda: Vec<f64>,
}

impl EigResult {
    pub fn reconstruct(&self) -> DenseMatrix {
        SvdResult { u: self.x.clone(), sigma: self.lambda.clone(), v: self.x.clone() }.reconstruct()
    }

    /// Largest `‖A x − λ x‖₂` over all returned pairs.
    pub fn max_residual(&self, a: &DenseMatrix) -> f64 {
        let ax = a.matmul(&self.x).expect("shapes agree");
        let mut worst = 0.0f64;
        for j in 0..self.x.cols() {
            let r: Vec<f64> = (0..self.x.rows()).map(|i| ax[(i, j)] - self.lambda[j] * self.x[(i, j)]).collect();
            worst = worst.max(norm2(&r));
        }
        worst
    }

    /// Builds a result from eigenvectors stored as rows.
    pub(crate) fn from_rows(lambda: Vec<f64>, rows: DenseMatrix) -> Self {
        EigResult { x: rows.transpose(), lambda }
    }

    /// Sorts pairs by ascending eigenvalue.
    pub fn sorted_ascending(self) -> Self {
        let mut idx: Vec<usize> = (0..self.lambda.len()).collect();
        idx.sort_by(|&a, &b| self.lambda[a].total_cmp(&self.lambda[b]));
        let lambda = idx.iter().map(|&i| self.lambda[i]).collect();
        EigResult { x: self.x.select_columns(&idx), lambda }
    }
}
