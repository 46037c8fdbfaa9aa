//! Symmetric SVD and eigendecomposition from first principles.
//!
//! Five backends share one contract: given a [`SymmetricMatrix`] they return
//! an [`SvdResult`] with orthogonal `U`, `V` and non-increasing `Σ`.
//!
//! | id         | method                                                   |
//! |------------|----------------------------------------------------------|
//! | `jacobi`   | two-sided cyclic Jacobi, then `σ = abs(λ)`              |
//! | `hestenes` | one-sided Jacobi on the columns                          |
//! | `gk`       | Householder bidiagonalization, zero-shift QR chase       |
//! | `qr`       | Householder tridiagonalization, Wilkinson-shifted QR/QL  |
//! | `dc`       | tridiagonalization, divide and conquer on the secular eq |
//!
//! ```
//! use svdlab_core::{decompose, Algorithm, DecomposeOptions, SymmetricMatrix};
//!
//! let a = SymmetricMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]).unwrap();
//! let s = decompose(&a, Algorithm::DivideConquer, &DecomposeOptions::default()).unwrap();
//! assert!((s.sigma[0] - 3.0).abs() < 1e-12);
//! assert!(s.relative_residual(&a) < 1e-14);
//! ```

pub mod bench;
pub mod dc;
pub mod deflation;
pub mod error;
pub mod golub_kahan;
pub mod hestenes;
pub mod io;
pub mod jacobi;
pub mod matrix;
pub mod par;
pub mod permutation;
pub mod secular;
pub mod svd;
pub mod transforms;
pub mod tridiag;

use std::fmt;
use std::str::FromStr;

pub use dc::{dc_eig, dc_svd, DcConfig};
pub use error::{Error, Result, Stage};
pub use golub_kahan::{gk_svd, GkConfig};
pub use hestenes::{hestenes_svd, HestenesConfig};
pub use jacobi::{jacobi_eig, jacobi_svd, JacobiConfig};
pub use matrix::{orth_tol, DenseMatrix, EigResult, SvdResult, SymmetricMatrix, TridiagonalMatrix};
pub use par::Parallelism;
pub use secular::{SecularProblem, SolverScheme};
pub use svd::{eigenvalues_from_svd, svd_from_eig};
pub use tridiag::{symmetric_qr_eig, tridiag_qr_svd, tridiagonalize, QrConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Jacobi,
    Hestenes,
    GolubKahan,
    TridiagonalQr,
    DivideConquer,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Jacobi,
        Algorithm::Hestenes,
        Algorithm::GolubKahan,
        Algorithm::TridiagonalQr,
        Algorithm::DivideConquer,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::Jacobi => "jacobi",
            Algorithm::Hestenes => "hestenes",
            Algorithm::GolubKahan => "gk",
            Algorithm::TridiagonalQr => "qr",
            Algorithm::DivideConquer => "dc",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown algorithm '{s}' (expected jacobi, hestenes, gk, qr or dc)")))
    }
}

/// Knobs shared by [`decompose`]; `None` keeps each backend's default.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecomposeOptions {
    pub tol: Option<f64>,
    pub cutoff: usize,
    pub scheme: SolverScheme,
    pub parallelism: Parallelism,
}

impl Default for DecomposeOptions {
    fn default() -> Self {
        DecomposeOptions { tol: None, cutoff: 25, scheme: SolverScheme::Hybrid, parallelism: Parallelism::available() }
    }
}

impl DecomposeOptions {
    pub fn dc_config(&self) -> DcConfig {
        DcConfig { cutoff: self.cutoff, scheme: self.scheme, qr: self.qr_config(), parallelism: self.parallelism }
    }

    pub fn qr_config(&self) -> QrConfig {
        let mut cfg = QrConfig::default();
        if let Some(t) = self.tol {
            cfg.tol = t;
        }
        cfg
    }
}

pub fn decompose(a: &SymmetricMatrix, alg: Algorithm, opts: &DecomposeOptions) -> Result<SvdResult> {
    match alg {
        Algorithm::Jacobi => {
            let mut cfg = JacobiConfig::default();
            if let Some(t) = opts.tol {
                cfg.tol = t;
            }
            jacobi_svd(a, &cfg)
        }
        Algorithm::Hestenes => {
            let mut cfg = HestenesConfig::default();
            if let Some(t) = opts.tol {
                cfg.tol = t;
            }
            hestenes_svd(a, &cfg)
        }
        Algorithm::GolubKahan => {
            let mut cfg = GkConfig::default();
            if let Some(t) = opts.tol {
                cfg.tol = t;
            }
            gk_svd(a, &cfg)
        }
        Algorithm::TridiagonalQr => tridiag_qr_svd(a, &opts.qr_config()),
        Algorithm::DivideConquer => dc_svd(a, &opts.dc_config()),
    }
}

/// Decomposes many matrices, one task per matrix under `Rayon`. Each
/// individual decomposition runs with `opts` unchanged.
pub fn decompose_batch(
    mats: &[SymmetricMatrix],
    alg: Algorithm,
    opts: &DecomposeOptions,
    par: Parallelism,
) -> Vec<Result<SvdResult>> {
    par::map_range(par, mats.len(), |i| decompose(&mats[i], alg, opts))
}
