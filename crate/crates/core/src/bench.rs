//! Test-matrix generation and the timing harness behind `svdlab bench`.

use std::fmt::Write as _;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::matrix::{DenseMatrix, SymmetricMatrix};
use crate::par::Parallelism;
use crate::{decompose, Algorithm, DecomposeOptions};

/// A run counts only if both its residual and orthogonality defect are at
/// most this.
pub const VALIDATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    /// `(B + Bᵀ)/2`, `B` uniform in `[−1, 1]`.
    RandomSymmetric,
    /// `BBᵀ/n + 10⁻³ I`.
    RandomSpd,
    /// `gᵢ gⱼ rᵢⱼ` with `gᵢ = 10^(−12 i/(n−1))` and `r` random symmetric.
    Graded,
    Identity,
}

impl MatrixKind {
    pub fn id(self) -> &'static str {
        match self {
            MatrixKind::RandomSymmetric => "random-symmetric",
            MatrixKind::RandomSpd => "random-spd",
            MatrixKind::Graded => "graded",
            MatrixKind::Identity => "identity",
        }
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [MatrixKind::RandomSymmetric, MatrixKind::RandomSpd, MatrixKind::Graded, MatrixKind::Identity]
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::Parse(format!("unknown matrix kind '{s}'")))
    }
}

/// Deterministic in `(n, seed, kind)`.
pub fn generate_symmetric(n: usize, seed: u64, kind: MatrixKind) -> SymmetricMatrix {
    assert!(n >= 1, "matrix order must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut b = DenseMatrix::zeros(n, n);
    if kind != MatrixKind::Identity {
        for x in b.as_mut_slice() {
            *x = rng.gen_range(-1.0..=1.0);
        }
    }
    let m = match kind {
        MatrixKind::Identity => DenseMatrix::identity(n),
        MatrixKind::RandomSymmetric => symmetric_part(&b),
        MatrixKind::RandomSpd => {
            let mut m = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..=i {
                    let v: f64 = b.row(i).iter().zip(b.row(j)).map(|(x, y)| x * y).sum::<f64>() / n as f64;
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
                m[(i, i)] += 1e-3;
            }
            m
        }
        MatrixKind::Graded => {
            let r = symmetric_part(&b);
            let g: Vec<f64> =
                (0..n).map(|i| if n == 1 { 1.0 } else { 10f64.powf(-12.0 * i as f64 / (n - 1) as f64) }).collect();
            let mut m = DenseMatrix::zeros(n, n);
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] = g[i] * g[j] * r[(i, j)];
                }
            }
            m
        }
    };
    SymmetricMatrix::new(m).expect("generated matrices are symmetric")
}

fn symmetric_part(b: &DenseMatrix) -> DenseMatrix {
    let n = b.rows();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = 0.5 * (b[(i, j)] + b[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchSpec {
    pub algorithms: Vec<Algorithm>,
    pub sizes: Vec<usize>,
    pub reps: usize,
    pub seed: u64,
    pub kind: MatrixKind,
}

impl BenchSpec {
    pub fn validate(&self) -> Result<()> {
        if self.algorithms.is_empty() || self.sizes.is_empty() {
            return Err(Error::Config("benchmark needs at least one algorithm and one size".into()));
        }
        if let Some(&n) = self.sizes.iter().find(|&&n| n < 2) {
            return Err(Error::Config(format!("benchmark sizes must be at least 2, got {n}")));
        }
        if self.reps == 0 {
            return Err(Error::Config("benchmark needs at least one repetition".into()));
        }
        Ok(())
    }
}

/// One `(algorithm, size)` cell. Times cover only the decomposition call
/// and only runs that passed validation.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchCell {
    pub alg: Algorithm,
    pub n: usize,
    pub median_s: f64,
    pub min_s: f64,
    pub max_s: f64,
    /// Worst residual over all timed runs.
    pub residual: f64,
    pub orth_defect: f64,
    pub valid_runs: usize,
    pub failure: Option<String>,
}

impl BenchCell {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none() && self.valid_runs > 0
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct BenchResult {
    pub cells: Vec<BenchCell>,
}

impl BenchResult {
    pub fn cell(&self, alg: Algorithm, n: usize) -> Option<&BenchCell> {
        self.cells.iter().find(|c| c.alg == alg && c.n == n)
    }

    pub fn all_valid(&self) -> bool {
        self.cells.iter().all(BenchCell::is_valid)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("alg,n,rep_median_s,rep_min_s,rep_max_s,residual,orth_defect\n");
        for c in &self.cells {
            writeln!(
                out,
                "{},{},{:.9},{:.9},{:.9},{:.3e},{:.3e}",
                c.alg, c.n, c.median_s, c.min_s, c.max_s, c.residual, c.orth_defect
            )
            .unwrap();
        }
        out
    }

    pub fn to_table(&self) -> String {
        let mut out = format!(
            "{:<9} {:>6} {:>12} {:>12} {:>12} {:>10} {:>10}  status\n",
            "alg", "n", "median_s", "min_s", "max_s", "residual", "orth"
        );
        for c in &self.cells {
            let status = match &c.failure {
                Some(f) => f.as_str(),
                None => "ok",
            };
            writeln!(
                out,
                "{:<9} {:>6} {:>12.6} {:>12.6} {:>12.6} {:>10.2e} {:>10.2e}  {}",
                c.alg.id(),
                c.n,
                c.median_s,
                c.min_s,
                c.max_s,
                c.residual,
                c.orth_defect,
                status
            )
            .unwrap();
        }
        out
    }
}

/// Runs every cell sequentially with backend parallelism off. Failures are
/// recorded in the cell, not returned.
pub fn run_benchmark(spec: &BenchSpec) -> Result<BenchResult> {
    spec.validate()?;
    let opts = DecomposeOptions { parallelism: Parallelism::Sequential, ..Default::default() };
    let mut result = BenchResult::default();
    for &n in &spec.sizes {
        let a = generate_symmetric(n, spec.seed, spec.kind);
        for &alg in &spec.algorithms {
            result.cells.push(run_cell(&a, alg, spec.reps, &opts));
        }
    }
    Ok(result)
}

fn run_cell(a: &SymmetricMatrix, alg: Algorithm, reps: usize, opts: &DecomposeOptions) -> BenchCell {
    let mut cell = BenchCell {
        alg,
        n: a.order(),
        median_s: f64::NAN,
        min_s: f64::NAN,
        max_s: f64::NAN,
        residual: 0.0,
        orth_defect: 0.0,
        valid_runs: 0,
        failure: None,
    };
    if let Err(e) = decompose(a, alg, opts) {
        cell.failure = Some(e.to_string());
        return cell;
    }
    let mut times = Vec::with_capacity(reps);
    for _ in 0..reps {
        let start = Instant::now();
        let out = decompose(a, alg, opts);
        let elapsed = start.elapsed().as_secs_f64();
        match out {
            Ok(s) => {
                let res = s.relative_residual(a);
                let orth = s.orthogonality_defect();
                cell.residual = cell.residual.max(res);
                cell.orth_defect = cell.orth_defect.max(orth);
                if res <= VALIDATION_TOL && orth <= VALIDATION_TOL {
                    times.push(elapsed);
                } else {
                    cell.failure = Some(format!("validation failed (residual {res:.2e}, orth {orth:.2e})"));
                }
            }
            Err(e) => cell.failure = Some(e.to_string()),
        }
    }
    cell.valid_runs = times.len();
    if !times.is_empty() {
        times.sort_by(f64::total_cmp);
        let mid = times.len() / 2;
        cell.median_s = if times.len() % 2 == 1 { times[mid] } else { 0.5 * (times[mid - 1] + times[mid]) };
        cell.min_s = times[0];
        cell.max_s = times[times.len() - 1];
    }
    cell
}
