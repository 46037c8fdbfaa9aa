//! Eigenface training through the `M×M` Gram matrix `AᵀA/M` of the centered
//! images, and projection-based classification.

use svdlab_core::matrix::{dot, norm2};
use svdlab_core::{decompose, orth_tol, Algorithm, DecomposeOptions, DenseMatrix, SymmetricMatrix};

use crate::error::{Error, Result};
use crate::pgm::Image;

/// Fraction of the total energy the default `k` must reach.
pub const DEFAULT_ENERGY: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledImage {
    pub label: String,
    pub image: Image,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenfaceModel {
    pub width: usize,
    pub height: usize,
    /// Mean image `Ψ`.
    pub psi: Vec<f64>,
    /// Unit eigenfaces, strongest first.
    pub eigenfaces: Vec<Vec<f64>>,
    /// `λᵢ / Σλⱼ` for each kept eigenface.
    pub energy_fractions: Vec<f64>,
    /// `Ω` of every training image, in training order.
    pub class_projections: Vec<Vec<f64>>,
    pub labels: Vec<String>,
    /// The `k` asked for (or picked by the energy rule) before any cap to
    /// the numerical rank.
    pub requested_k: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification {
    pub label: String,
    /// Training image whose `Ω` is nearest.
    pub nearest: usize,
    /// `‖Ω − Ω_nearest‖₂`.
    pub distance: f64,
    /// `‖Φ − Φ̂‖₂`.
    pub reconstruction_error: f64,
}

impl EigenfaceModel {
    pub fn k(&self) -> usize {
        self.eigenfaces.len()
    }

    pub fn pixels(&self) -> usize {
        self.width * self.height
    }

    pub fn training_count(&self) -> usize {
        self.class_projections.len()
    }

    /// True when fewer eigenfaces were kept than requested.
    pub fn is_capped(&self) -> bool {
        self.k() < self.requested_k
    }

    fn check(&self, img: &Image) -> Result<()> {
        if img.width != self.width || img.height != self.height {
            return Err(Error::DimensionMismatch {
                expected_w: self.width,
                expected_h: self.height,
                found_w: img.width,
                found_h: img.height,
            });
        }
        Ok(())
    }

    /// `Φ = Γ − Ψ`.
    pub fn center(&self, img: &Image) -> Result<Vec<f64>> {
        self.check(img)?;
        Ok(img.pixels.iter().zip(&self.psi).map(|(g, p)| g - p).collect())
    }

    /// `Ω = UᵀΦ`.
    pub fn project(&self, img: &Image) -> Result<Vec<f64>> {
        let phi = self.center(img)?;
        Ok(self.eigenfaces.iter().map(|u| dot(u, &phi)).collect())
    }

    /// Centered `Φ̂ = Σ ωᵢuᵢ`.
    pub fn reconstruct(&self, omega: &[f64]) -> Result<Vec<f64>> {
        if omega.len() != self.k() {
            return Err(Error::LengthMismatch { expected: self.k(), found: omega.len() });
        }
        let mut out = vec![0.0; self.pixels()];
        for (u, &w) in self.eigenfaces.iter().zip(omega) {
            for (o, x) in out.iter_mut().zip(u) {
                *o += w * x;
            }
        }
        Ok(out)
    }

    /// `‖Φ − Φ̂‖₂` using only the first `k` eigenfaces.
    pub fn reconstruction_error(&self, img: &Image, k: usize) -> Result<f64> {
        if k > self.k() {
            return Err(Error::InvalidK { k, m: self.k() });
        }
        let phi = self.center(img)?;
        let mut r = phi.clone();
        for u in &self.eigenfaces[..k] {
            let w = dot(u, &phi);
            for (x, y) in r.iter_mut().zip(u) {
                *x -= w * y;
            }
        }
        Ok(norm2(&r))
    }

    /// Nearest stored `Ω` decides the label; the reconstruction error is
    /// reported alongside as a face/non-face measure.
    pub fn classify(&self, img: &Image) -> Result<Classification> {
        if self.k() == 0 || self.class_projections.is_empty() {
            return Err(Error::EmptyModel);
        }
        let omega = self.project(img)?;
        let (nearest, distance) = self
            .class_projections
            .iter()
            .map(|w| w.iter().zip(&omega).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("non-empty");
        let phi = self.center(img)?;
        let phi_hat = self.reconstruct(&omega)?;
        let reconstruction_error = norm2(&phi.iter().zip(&phi_hat).map(|(a, b)| a - b).collect::<Vec<_>>());
        Ok(Classification { label: self.labels[nearest].clone(), nearest, distance, reconstruction_error })
    }

    /// Orthogonal projector `UUᵀ` onto the face space.
    pub fn projector(&self) -> DenseMatrix {
        let n = self.pixels();
        let mut p = DenseMatrix::zeros(n, n);
        for u in &self.eigenfaces {
            for i in 0..n {
                let row = p.row_mut(i);
                for (x, &uj) in row.iter_mut().zip(u) {
                    *x += u[i] * uj;
                }
            }
        }
        p
    }
}

/// Trains on `samples` with `k` eigenfaces, or the smallest `k` reaching
/// [`DEFAULT_ENERGY`] when `k` is `None`.
///
/// Eigenvalues at or below `N·ε·λ₁` (`N` pixels) are treated as zero, and
/// `k` is capped at the count above that; the cap is visible through
/// [`EigenfaceModel::is_capped`]. Zero rank is an error.
pub fn train(samples: &[LabeledImage], k: Option<usize>, alg: Algorithm) -> Result<EigenfaceModel> {
    let m = samples.len();
    if m < 2 {
        return Err(Error::TooFewImages(m));
    }
    if let Some(k) = k {
        if k == 0 || k > m {
            return Err(Error::InvalidK { k, m });
        }
    }
    let (width, height) = (samples[0].image.width, samples[0].image.height);
    for s in samples {
        if s.image.width != width || s.image.height != height {
            return Err(Error::DimensionMismatch {
                expected_w: width,
                expected_h: height,
                found_w: s.image.width,
                found_h: s.image.height,
            });
        }
    }
    let n = width * height;

    let mut psi = vec![0.0; n];
    for s in samples {
        for (p, x) in psi.iter_mut().zip(&s.image.pixels) {
            *p += x;
        }
    }
    for p in &mut psi {
        *p /= m as f64;
    }
    let phis: Vec<Vec<f64>> =
        samples.iter().map(|s| s.image.pixels.iter().zip(&psi).map(|(g, p)| g - p).collect()).collect();

    // AᵀA/M; the 1/M scales eigenvalues only.
    let mut g = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = dot(&phis[i], &phis[j]) / m as f64;
            g[(i, j)] = v;
            g[(j, i)] = v;
        }
    }
    let svd = decompose(&SymmetricMatrix::new(g)?, alg, &DecomposeOptions::default())?;
    // AᵀA is positive semidefinite, so σᵢ are its eigenvalues and the
    // columns of U its eigenvectors.
    let lambda = &svd.sigma;
    let total: f64 = lambda.iter().sum();
    let floor = n as f64 * f64::EPSILON * lambda[0];
    let rank = lambda.iter().take_while(|&&l| l > floor).count();
    if rank == 0 {
        return Err(Error::RankDeficient { rank });
    }

    let requested_k = k.unwrap_or_else(|| {
        let mut acc = 0.0;
        for (i, l) in lambda.iter().enumerate() {
            acc += l;
            if acc >= DEFAULT_ENERGY * total {
                return i + 1;
            }
        }
        m
    });
    let kept = requested_k.min(rank);

    let mut eigenfaces: Vec<Vec<f64>> = Vec::with_capacity(kept);
    for i in 0..kept {
        // uᵢ = Avᵢ, then one Gram–Schmidt pass against the stronger faces
        // to remove the O(ε λ₁/λᵢ) drift of the lift.
        let v = svd.u.col(i);
        let mut u = vec![0.0; n];
        for (phi, &vj) in phis.iter().zip(&v) {
            for (x, p) in u.iter_mut().zip(phi) {
                *x += vj * p;
            }
        }
        for prev in &eigenfaces {
            let c = dot(prev, &u);
            for (x, p) in u.iter_mut().zip(prev) {
                *x -= c * p;
            }
        }
        let nu = norm2(&u);
        for x in &mut u {
            *x /= nu;
        }
        eigenfaces.push(u);
    }
    debug_assert!(eigenfaces.iter().all(|u| (norm2(u) - 1.0).abs() <= orth_tol(n)));

    let energy_fractions = lambda[..kept].iter().map(|l| l / total).collect();
    let class_projections = phis.iter().map(|phi| eigenfaces.iter().map(|u| dot(u, phi)).collect()).collect();
    Ok(EigenfaceModel {
        width,
        height,
        psi,
        eigenfaces,
        energy_fractions,
        class_projections,
        labels: samples.iter().map(|s| s.label.clone()).collect(),
        requested_k,
    })
}
