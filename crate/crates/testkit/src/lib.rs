//! Reference computations used only by tests. None of them call into the
//! decompositions under test.

use num::{BigInt, BigRational, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use svdlab_core::{DenseMatrix, SymmetricMatrix, TridiagonalMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(n: usize, rng: &mut impl Rng) -> SymmetricMatrix {
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rng.gen_range(-1.0..1.0);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    SymmetricMatrix::new(m).unwrap()
}

pub fn random_tridiagonal(n: usize, rng: &mut impl Rng) -> TridiagonalMatrix {
    let d = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let e = (0..n.saturating_sub(1)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    TridiagonalMatrix::new(d, e).unwrap()
}

/// Orthonormal columns from modified Gram–Schmidt on a random matrix.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DenseMatrix {
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(n);
    while cols.len() < n {
        let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for _ in 0..2 {
            for c in &cols {
                let p: f64 = v.iter().zip(c).map(|(a, b)| a * b).sum();
                for (x, y) in v.iter_mut().zip(c) {
                    *x -= p * y;
                }
            }
        }
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-3 {
            cols.push(v.into_iter().map(|x| x / nv).collect());
        }
    }
    DenseMatrix::from_columns(&cols).unwrap()
}

fn rational(x: f64) -> BigRational {
    BigRational::from_float(x).expect("finite value")
}

/// Exact sign of `det(A − λI)`, with `A` and `λ` taken as exact binary
/// fractions.
pub fn char_poly_sign(a: &DenseMatrix, lam: f64) -> i32 {
    let n = a.rows();
    let l = rational(lam);
    let mut m: Vec<Vec<BigRational>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = rational(a[(i, j)]);
                    if i == j {
                        v - &l
                    } else {
                        v
                    }
                })
                .collect()
        })
        .collect();
    let mut sign = 1;
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !m[r][k].is_zero()) else { return 0 };
        if p != k {
            m.swap(p, k);
            sign = -sign;
        }
        if m[k][k].is_negative() {
            sign = -sign;
        }
        for r in (k + 1)..n {
            if m[r][k].is_zero() {
                continue;
            }
            let f = &m[r][k] / &m[k][k];
            for c in k..n {
                let t = &f * &m[k][c];
                m[r][c] -= t;
            }
        }
    }
    sign
}

/// `det(A − λI)` in floating point by LU with partial pivoting.
fn char_poly_f64(a: &DenseMatrix, lam: f64) -> f64 {
    let n = a.rows();
    let mut m: Vec<Vec<f64>> =
        (0..n).map(|i| (0..n).map(|j| a[(i, j)] - if i == j { lam } else { 0.0 }).collect()).collect();
    let mut det = 1.0;
    for k in 0..n {
        let p = (k..n).max_by(|&x, &y| m[x][k].abs().total_cmp(&m[y][k].abs())).unwrap();
        if m[p][k] == 0.0 {
            return 0.0;
        }
        if p != k {
            m.swap(p, k);
            det = -det;
        }
        det *= m[k][k];
        for r in (k + 1)..n {
            let f = m[r][k] / m[k][k];
            for c in k..n {
                m[r][c] -= f * m[k][c];
            }
        }
    }
    det
}

/// Eigenvalues of a small symmetric matrix as roots of `det(A − λI)`:
/// sign changes on a uniform grid over the Gershgorin interval, each refined
/// by bisection with exact signs. The grid is refined until `n` roots are
/// bracketed.
pub fn char_poly_eigenvalues(a: &DenseMatrix) -> Vec<f64> {
    let n = a.rows();
    let r = (0..n).map(|i| a.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0f64, f64::max);
    let (lo, hi) = (-r - 1e-3, r + 1e-3);
    let mut points = 10_000;
    loop {
        let h = (hi - lo) / points as f64;
        let mut roots = Vec::new();
        let mut x0 = lo;
        let mut s0 = char_poly_f64(a, x0).signum();
        for k in 1..=points {
            let x1 = if k == points { hi } else { lo + k as f64 * h };
            let v = char_poly_f64(a, x1);
            if v == 0.0 {
                roots.push(x1);
                x0 = x1;
                continue;
            }
            let s1 = v.signum();
            if s1 != s0 && s0 != 0.0 {
                roots.push(bisect(a, x0, x1));
            }
            x0 = x1;
            s0 = s1;
        }
        if roots.len() >= n || points > 10_000_000 {
            roots.sort_by(f64::total_cmp);
            return roots;
        }
        points *= 10;
    }
}

fn bisect(a: &DenseMatrix, mut lo: f64, mut hi: f64) -> f64 {
    let slo = char_poly_sign(a, lo);
    if slo == 0 {
        return lo;
    }
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let s = char_poly_sign(a, mid);
        if s == 0 {
            return mid;
        }
        if s == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

/// `(f(λ), f'(λ))` of `1 + ρ Σ uᵢ²/(dᵢ − λ)` evaluated exactly, then rounded.
pub fn secular_eval_exact(d: &[f64], u: &[f64], rho: f64, lam: f64) -> (f64, f64) {
    let l = rational(lam);
    let r = rational(rho);
    let mut f = BigRational::from_integer(BigInt::from(1));
    let mut fp = BigRational::zero();
    for (&di, &ui) in d.iter().zip(u) {
        let w = &r * rational(ui) * rational(ui);
        let delta = rational(di) - &l;
        let t = &w / &delta;
        fp += &t / &delta;
        f += t;
    }
    (f.to_f64().unwrap(), fp.to_f64().unwrap())
}

/// `max |a_i − b_i|` for equal-length slices.
pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
