use std::fmt;

/// Errors produced by the decompositions and their building blocks.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not symmetric (max asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("invalid dimensions: {0}")]
    Dimension(String),
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("cannot build a reflector from a zero vector")]
    ZeroVector,
    #[error("{stage} did not converge ({detail})")]
    NoConvergence { stage: Stage, detail: usize },
    #[error("secular scheme {scheme} failed on interval {interval}")]
    SchemeFailure { scheme: &'static str, interval: usize },
    #[error("secular function evaluated at pole {index}")]
    PoleEvaluation { index: usize },
    #[error("interlacing violated at weight {index} (radicand {radicand:e})")]
    InterlacingViolation { index: usize, radicand: f64 },
    #[error("split at {index} has zero coupling")]
    ZeroCoupling { index: usize },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Which iteration gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Jacobi,
    Hestenes,
    GolubKahan,
    TridiagonalQr,
    Secular,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Stage::Jacobi => "two-sided Jacobi",
            Stage::Hestenes => "Hestenes one-sided Jacobi",
            Stage::GolubKahan => "Golub-Kahan chase",
            Stage::TridiagonalQr => "tridiagonal QR/QL",
            Stage::Secular => "secular solver",
        };
        f.write_str(name)
    }
}

impl Error {
    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, Error::NoConvergence { .. } | Error::SchemeFailure { .. } | Error::InterlacingViolation { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
