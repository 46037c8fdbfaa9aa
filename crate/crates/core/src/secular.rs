//! The secular equation `f(λ) = 1 + ρ Σ uᵢ² / (dᵢ − λ)` of a rank-one
//! update `D + ρuuᵀ`, its root finders and the eigenvectors built from the
//! roots.
//!
//! Roots are kept as `(origin, τ)` with `λ = d[origin] + τ`, where `origin`
//! is the pole nearer to the root. Every difference `λⱼ − dₖ` is then formed
//! as `(d[originⱼ] − dₖ) + τⱼ`, which keeps the small gaps accurate.
//!
//! Internally everything is solved for `ρ > 0`. A problem with `ρ < 0` is
//! mirrored (`d → −d` reversed) first and the answer mapped back.

use std::str::FromStr;

use crate::error::{Error, Result, Stage};
use crate::matrix::{norm2, DenseMatrix};
use crate::par::{map_range, Parallelism};

#[derive(Debug, Clone, PartialEq)]
pub struct SecularProblem {
    pub d: Vec<f64>,
    pub u: Vec<f64>,
    pub rho: f64,
}

impl SecularProblem {
    /// Checks lengths and finiteness. Poles need not be sorted here; the
    /// solvers require ascending, separated poles and nonzero weights.
    pub fn new(d: Vec<f64>, u: Vec<f64>, rho: f64) -> Result<Self> {
        if d.len() != u.len() {
            return Err(Error::LengthMismatch { expected: d.len(), found: u.len() });
        }
        if !rho.is_finite() || d.iter().chain(&u).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(SecularProblem { d, u, rho })
    }

    pub fn order(&self) -> usize {
        self.d.len()
    }

    pub fn weight_norm2(&self) -> f64 {
        let n = norm2(&self.u);
        n * n
    }

    /// Dense `D + ρuuᵀ`.
    pub fn to_dense(&self) -> DenseMatrix {
        let n = self.order();
        let mut m = DenseMatrix::from_diag(&self.d);
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] += self.rho * self.u[i] * self.u[j];
            }
        }
        m
    }

    fn validate_for_solve(&self) -> Result<()> {
        if self.rho == 0.0 && !self.d.is_empty() {
            return Err(Error::Config("secular problem needs rho != 0".into()));
        }
        if self.d.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Config("secular poles must be strictly ascending".into()));
        }
        if self.u.contains(&0.0) {
            return Err(Error::Config("secular weights must be nonzero".into()));
        }
        Ok(())
    }

    /// Mirror image with positive `ρ`.
    fn positive(&self) -> Positive {
        let n = self.order();
        if self.rho > 0.0 {
            Positive { d: self.d.clone(), u: self.u.clone(), rho: self.rho, flipped: false }
        } else {
            Positive {
                d: (0..n).map(|i| -self.d[n - 1 - i]).collect(),
                u: (0..n).map(|i| self.u[n - 1 - i]).collect(),
                rho: -self.rho,
                flipped: true,
            }
        }
    }
}

struct Positive {
    d: Vec<f64>,
    u: Vec<f64>,
    rho: f64,
    flipped: bool,
}

impl Positive {
    fn weights(&self) -> Vec<f64> {
        self.u.iter().map(|u| self.rho * u * u).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SolverScheme {
    ApproachLeft,
    ApproachRight,
    MiddleWay,
    FixedWeight,
    #[default]
    Hybrid,
}

impl SolverScheme {
    pub const ALL: [SolverScheme; 5] = [
        SolverScheme::ApproachLeft,
        SolverScheme::ApproachRight,
        SolverScheme::MiddleWay,
        SolverScheme::FixedWeight,
        SolverScheme::Hybrid,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverScheme::ApproachLeft => "left",
            SolverScheme::ApproachRight => "right",
            SolverScheme::MiddleWay => "middle",
            SolverScheme::FixedWeight => "fixed",
            SolverScheme::Hybrid => "hybrid",
        }
    }
}

impl FromStr for SolverScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverScheme::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown secular scheme '{s}'")))
    }
}

impl std::fmt::Display for SolverScheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub scheme: SolverScheme,
    /// Residual tolerance; `None` means `4nε`.
    pub rtol: Option<f64>,
    pub max_iter: usize,
    /// Keep every iterate in [`SecularRoots::iterates`].
    pub record_iterates: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions { scheme: SolverScheme::Hybrid, rtol: None, max_iter: 100, record_iterates: false }
    }
}

/// Roots in ascending order together with their shifted representation.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SecularRoots {
    pub lambda: Vec<f64>,
    pub origin: Vec<usize>,
    pub tau: Vec<f64>,
    pub iterations: Vec<usize>,
    pub iterates: Vec<Vec<f64>>,
}

impl SecularRoots {
    /// Shifted form of plain root values, each relative to its nearest pole.
    pub fn from_lambdas(p: &SecularProblem, lambda: &[f64]) -> Self {
        let mut origin = Vec::with_capacity(lambda.len());
        let mut tau = Vec::with_capacity(lambda.len());
        for &l in lambda {
            let k = (0..p.order()).min_by(|&a, &b| (l - p.d[a]).abs().total_cmp(&(l - p.d[b]).abs())).unwrap_or(0);
            origin.push(k);
            tau.push(l - p.d[k]);
        }
        SecularRoots { lambda: lambda.to_vec(), origin, tau, iterations: vec![0; lambda.len()], iterates: Vec::new() }
    }

    fn diff(&self, d: &[f64], j: usize, k: usize) -> f64 {
        (d[self.origin[j]] - d[k]) + self.tau[j]
    }

    fn mirrored(&self, n: usize) -> SecularRoots {
        let rev = |v: &[f64]| v.iter().rev().map(|x| -x).collect::<Vec<_>>();
        SecularRoots {
            lambda: rev(&self.lambda),
            origin: self.origin.iter().rev().map(|&o| n - 1 - o).collect(),
            tau: rev(&self.tau),
            iterations: self.iterations.iter().rev().copied().collect(),
            iterates: self.iterates.iter().rev().map(|v| v.iter().map(|x| -x).collect()).collect(),
        }
    }
}

/// `(f(λ), f'(λ))`.
pub fn secular_eval(p: &SecularProblem, lam: f64) -> Result<(f64, f64)> {
    let (mut psi, mut phi, mut dpsi, mut dphi) = (0.0, 0.0, 0.0, 0.0);
    for (k, (&d, &u)) in p.d.iter().zip(&p.u).enumerate() {
        let delta = d - lam;
        if delta == 0.0 {
            return Err(Error::PoleEvaluation { index: k });
        }
        let t = p.rho * u * u / delta;
        let dt = t / delta;
        // Ψ collects poles below λ, Φ those above.
        if delta < 0.0 {
            psi += t;
            dpsi += dt;
        } else {
            phi += t;
            dphi += dt;
        }
    }
    Ok((1.0 + psi + phi, dpsi + dphi))
}

/// Plain root values, ascending.
pub fn secular_roots(p: &SecularProblem, scheme: SolverScheme, rtol: f64, max_iter: usize) -> Result<Vec<f64>> {
    let opts = SolveOptions { scheme, rtol: Some(rtol), max_iter, record_iterates: false };
    Ok(solve_secular(p, &opts)?.lambda)
}

/// All roots. `ApproachLeft` and `ApproachRight` report `SchemeFailure`
/// when an iterate leaves its bracket; see [`solve_secular_with_fallback`].
pub fn solve_secular(p: &SecularProblem, opts: &SolveOptions) -> Result<SecularRoots> {
    solve_impl(p, opts, false)
}

/// As [`solve_secular`], retrying failed roots with `MiddleWay`.
pub fn solve_secular_with_fallback(p: &SecularProblem, opts: &SolveOptions) -> Result<SecularRoots> {
    solve_impl(p, opts, true)
}

fn solve_impl(p: &SecularProblem, opts: &SolveOptions, fallback: bool) -> Result<SecularRoots> {
    solve_par(p, opts, fallback, Parallelism::Sequential)
}

/// Roots solved independently, possibly in parallel; the output does not
/// depend on `par`.
pub(crate) fn solve_par(
    p: &SecularProblem,
    opts: &SolveOptions,
    fallback: bool,
    par: Parallelism,
) -> Result<SecularRoots> {
    p.validate_for_solve()?;
    let n = p.order();
    if n == 0 {
        return Ok(SecularRoots::default());
    }
    let pos = p.positive();
    let w = pos.weights();
    let rtol = opts.rtol.unwrap_or(4.0 * n as f64 * f64::EPSILON);
    let solved = map_range(par, n, |i| {
        let mut trace = opts.record_iterates.then(Vec::new);
        let r = match solve_root(&pos.d, &w, i, opts.scheme, rtol, opts.max_iter, trace.as_mut()) {
            Err(Error::SchemeFailure { .. }) if fallback => {
                if let Some(t) = trace.as_mut() {
                    t.clear();
                }
                solve_root(&pos.d, &w, i, SolverScheme::MiddleWay, rtol, opts.max_iter, trace.as_mut())
            }
            other => other,
        };
        r.map(|r| (r, trace))
    });
    let mut roots = SecularRoots::default();
    for item in solved {
        let (r, trace) = item?;
        roots.lambda.push(pos.d[r.origin] + r.tau);
        roots.origin.push(r.origin);
        roots.tau.push(r.tau);
        roots.iterations.push(r.iterations);
        if let Some(t) = trace {
            roots.iterates.push(t);
        }
    }
    Ok(if pos.flipped { roots.mirrored(n) } else { roots })
}

pub(crate) struct Root {
    pub origin: usize,
    pub tau: f64,
    pub iterations: usize,
}

/// Terms of `f` at `τ` relative to pole `origin`, split at the bracket's
/// left pole `i`.
struct Eval {
    f: f64,
    psi: f64,
    phi: f64,
    dpsi: f64,
    dphi: f64,
    abs_sum: f64,
}

fn eval_shifted(delta: &[f64], w: &[f64], i: usize, tau: f64) -> Eval {
    let mut e = Eval { f: 1.0, psi: 0.0, phi: 0.0, dpsi: 0.0, dphi: 0.0, abs_sum: 0.0 };
    for (j, (&dj, &wj)) in delta.iter().zip(w).enumerate() {
        let gap = dj - tau;
        let t = wj / gap;
        let dt = t / gap;
        if j <= i {
            e.psi += t;
            e.dpsi += dt;
        } else {
            e.phi += t;
            e.dphi += dt;
        }
        e.abs_sum += t.abs();
    }
    e.f = 1.0 + e.psi + e.phi;
    e
}

/// Root `i` of the positive-ρ problem with poles `d` and weights `w = ρu²`.
/// It lies in `(d_i, d_{i+1})`, or in `(d_{n−1}, d_{n−1} + Σw]` for the last.
pub(crate) fn solve_root(
    d: &[f64],
    w: &[f64],
    i: usize,
    scheme: SolverScheme,
    rtol: f64,
    max_iter: usize,
    mut trace: Option<&mut Vec<f64>>,
) -> Result<Root> {
    let n = d.len();
    let last = i + 1 == n;

    // Pick the nearer pole as origin from the sign of f at the midpoint.
    let (origin, mut lo, mut hi, start) = if last {
        let wsum: f64 = w.iter().sum();
        (i, 0.0, wsum, wsum)
    } else {
        let gap = d[i + 1] - d[i];
        let delta: Vec<f64> = d.iter().map(|&x| x - d[i]).collect();
        let fmid = eval_shifted(&delta, w, i, gap / 2.0).f;
        if fmid > 0.0 {
            (i, 0.0, gap / 2.0, gap / 2.0)
        } else {
            (i + 1, -gap / 2.0, 0.0, -gap / 2.0)
        }
    };
    let delta: Vec<f64> = d.iter().map(|&x| x - d[origin]).collect();
    let eval = |tau: f64| eval_shifted(&delta, w, i, tau);
    // lo/hi bound the root; an end equal to 0 with origin on that side is a pole.
    let mut tau = start;

    match scheme {
        SolverScheme::ApproachLeft => {
            while eval(tau).f > 0.0 {
                hi = tau;
                tau = 0.5 * (lo + tau);
            }
        }
        SolverScheme::ApproachRight if !last => {
            while eval(tau).f < 0.0 {
                lo = tau;
                tau = 0.5 * (tau + hi);
            }
        }
        _ => {}
    }

    for it in 0..=max_iter {
        let e = eval(tau);
        if let Some(t) = trace.as_deref_mut() {
            t.push(d[origin] + tau);
        }
        if e.f.abs() <= rtol * (1.0 + e.abs_sum) {
            return Ok(Root { origin, tau, iterations: it });
        }
        if e.f < 0.0 {
            lo = lo.max(tau);
        } else {
            hi = hi.min(tau);
        }
        if hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            return Ok(Root { origin, tau, iterations: it });
        }
        if it == max_iter {
            break;
        }
        let di = delta[i] - tau;
        let di1 = if last { f64::INFINITY } else { delta[i + 1] - tau };
        let step = match scheme {
            SolverScheme::ApproachLeft => approach_left(&e, di1, last),
            SolverScheme::ApproachRight => approach_right(&e, di, di1, last),
            SolverScheme::MiddleWay => middle_way(&e, di, di1, last),
            SolverScheme::FixedWeight => fixed_weight(&e, &delta, w, i, origin, tau, last),
            SolverScheme::Hybrid => hybrid(&e, &delta, w, origin, tau, lo - tau, hi - tau),
        };
        let next = step.map(|eta| tau + eta);
        tau = match next {
            Some(t) if t > lo && t < hi => t,
            _ if matches!(scheme, SolverScheme::ApproachLeft | SolverScheme::ApproachRight) => {
                return Err(Error::SchemeFailure { scheme: scheme.name(), interval: i });
            }
            _ => 0.5 * (lo + hi),
        };
    }
    Err(Error::NoConvergence { stage: Stage::Secular, detail: i })
}

/// Root of `c + s1/(e1 − η) + s2/(e2 − η) = 0` with `e1 < 0 < e2` nearest
/// to zero, given `f = c + s1/e1 + s2/e2`.
fn two_pole_step(c: f64, e1: f64, s1: f64, e2: f64, s2: f64, f: f64) -> Option<f64> {
    if !e2.is_finite() || s2 == 0.0 {
        // c + s1/(e1 − η) = 0.
        return (c > 0.0).then(|| e1 + s1 / c);
    }
    let a = c * (e1 + e2) + s1 + s2;
    let b = e1 * e2 * f;
    if c == 0.0 {
        return (a != 0.0).then(|| b / a);
    }
    let disc = (a * a - 4.0 * b * c).max(0.0).sqrt();
    let eta = if a <= 0.0 { (a - disc) / (2.0 * c) } else { 2.0 * b / (a + disc) };
    eta.is_finite().then_some(eta)
}

/// Ψ by `p/(q − τ)` matching value and slope, Φ by `r + s/(δ_{i+1} − τ)`.
fn approach_left(e: &Eval, di1: f64, last: bool) -> Option<f64> {
    let e1 = e.psi / e.dpsi;
    let s1 = e.psi * e.psi / e.dpsi;
    if last {
        return two_pole_step(1.0, e1, s1, f64::INFINITY, 0.0, e.f);
    }
    let s2 = e.dphi * di1 * di1;
    let c = 1.0 + e.phi - e.dphi * di1;
    two_pole_step(c, e1, s1, di1, s2, e.f)
}

/// Mirror of [`approach_left`]: Φ by `p/(q − τ)`, Ψ by `r + s/(δ_i − τ)`.
fn approach_right(e: &Eval, di: f64, di1: f64, last: bool) -> Option<f64> {
    if last {
        return middle_way(e, di, di1, last);
    }
    let e2 = e.phi / e.dphi;
    let s2 = e.phi * e.phi / e.dphi;
    let s1 = e.dpsi * di * di;
    let c = 1.0 + e.psi - e.dpsi * di;
    two_pole_step(c, di, s1, e2, s2, e.f)
}

/// Both sums interpolated with their own bracketing pole.
fn middle_way(e: &Eval, di: f64, di1: f64, last: bool) -> Option<f64> {
    let s1 = e.dpsi * di * di;
    if last {
        let c = e.f - e.dpsi * di;
        return two_pole_step(c, di, s1, f64::INFINITY, 0.0, e.f);
    }
    let s2 = e.dphi * di1 * di1;
    let c = e.f - e.dpsi * di - e.dphi * di1;
    two_pole_step(c, di, s1, di1, s2, e.f)
}

/// The nearer pole keeps its true weight; the other bracketing pole absorbs
/// the remaining slope.
fn fixed_weight(e: &Eval, delta: &[f64], w: &[f64], i: usize, origin: usize, tau: f64, last: bool) -> Option<f64> {
    let fprime = e.dpsi + e.dphi;
    let dk = delta[origin] - tau;
    let frozen = w[origin] / (dk * dk);
    let other = if last {
        if i == 0 {
            return two_pole_step(e.f - w[origin] / dk, dk, w[origin], f64::INFINITY, 0.0, e.f);
        }
        i - 1
    } else if origin == i {
        i + 1
    } else {
        i
    };
    let dother = delta[other] - tau;
    let s_other = (fprime - frozen) * dother * dother;
    let c = e.f - w[origin] / dk - s_other / dother;
    let (e1, s1, e2, s2) =
        if dother < dk { (dother, s_other, dk, w[origin]) } else { (dk, w[origin], dother, s_other) };
    if e2 < 0.0 {
        // Both model poles lie left of τ (last root): take the root right of them.
        return quadratic_root_right_of(c, e1, s1, e2, s2, e.f);
    }
    two_pole_step(c, e1, s1, e2, s2, e.f)
}

/// Root of `c + s1/(e1 − η) + s2/(e2 − η)` to the right of `e1 < e2 < 0`.
fn quadratic_root_right_of(c: f64, e1: f64, s1: f64, e2: f64, s2: f64, f: f64) -> Option<f64> {
    if !(c > 0.0) {
        return None;
    }
    let a = c * (e1 + e2) + s1 + s2;
    let b = e1 * e2 * f;
    let disc = a * a - 4.0 * b * c;
    if disc < 0.0 {
        return None;
    }
    let q = 0.5 * (a + a.signum() * disc.sqrt());
    let r1 = q / c;
    let r2 = if q != 0.0 { b / q } else { r1 };
    let eta = r1.max(r2);
    (eta > e2).then_some(eta)
}

/// Three-pole model `c + s/(Δ_{k−1} − η) + w_k/(Δ_k − η) + S/(Δ_{k+1} − η)`
/// around the origin pole `k`, solved by safeguarded Newton on `(a, b)`.
fn hybrid(e: &Eval, delta: &[f64], w: &[f64], k: usize, tau: f64, a: f64, b: f64) -> Option<f64> {
    let n = delta.len();
    let (mut dl, mut dr) = (0.0, 0.0);
    for j in 0..n {
        let g = delta[j] - tau;
        let t = w[j] / (g * g);
        if j < k {
            dl += t;
        } else if j > k {
            dr += t;
        }
    }
    let dk = delta[k] - tau;
    let mut poles = [(dk, w[k]), (f64::NAN, 0.0), (f64::NAN, 0.0)];
    let mut c = e.f - w[k] / dk;
    if k > 0 {
        let g = delta[k - 1] - tau;
        poles[1] = (g, dl * g * g);
        c -= poles[1].1 / g;
    }
    if k + 1 < n {
        let g = delta[k + 1] - tau;
        poles[2] = (g, dr * g * g);
        c -= poles[2].1 / g;
    }
    let model = |eta: f64| {
        let mut g = c;
        let mut dg = 0.0;
        for &(p, s) in &poles {
            if s != 0.0 {
                let q = p - eta;
                g += s / q;
                dg += s / (q * q);
            }
        }
        (g, dg)
    };
    // g(0) = f; the model root lies on the side where g changes sign.
    let (mut lo, mut hi) = if e.f < 0.0 { (0.0, b) } else { (a, 0.0) };
    let mut eta = 0.0;
    let (mut g, mut dg) = (e.f, e.dpsi + e.dphi);
    for _ in 0..60 {
        let mut next = eta - g / dg;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        if (next - eta).abs() <= 2.0 * f64::EPSILON * next.abs().max(f64::MIN_POSITIVE) {
            return Some(next);
        }
        eta = next;
        (g, dg) = model(eta);
        if g == 0.0 {
            break;
        }
        if g < 0.0 {
            lo = eta;
        } else {
            hi = eta;
        }
    }
    Some(eta)
}

/// Weights `û` for which the computed roots are exact eigenvalues of
/// `D + ρûûᵀ`, with signs taken from `u`.
pub fn corrected_weights(p: &SecularProblem, roots: &SecularRoots) -> Result<Vec<f64>> {
    let n = p.order();
    if roots.lambda.len() != n {
        return Err(Error::LengthMismatch { expected: n, found: roots.lambda.len() });
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let pos = p.positive();
    let r = if pos.flipped { roots.mirrored(n) } else { roots.clone() };
    let uu: f64 = pos.u.iter().map(|x| x * x).sum();
    let mut uhat = Vec::with_capacity(n);
    for k in 0..n {
        let mut rad = r.diff(&pos.d, n - 1, k) / pos.rho;
        for j in 0..k {
            rad *= r.diff(&pos.d, j, k) / (pos.d[j] - pos.d[k]);
        }
        for j in k..n - 1 {
            rad *= r.diff(&pos.d, j, k) / (pos.d[j + 1] - pos.d[k]);
        }
        if rad < -(n as f64) * f64::EPSILON * uu {
            let index = if pos.flipped { n - 1 - k } else { k };
            return Err(Error::InterlacingViolation { index, radicand: rad });
        }
        uhat.push(rad.max(0.0).sqrt().copysign(pos.u[k]));
    }
    if pos.flipped {
        uhat.reverse();
    }
    Ok(uhat)
}

/// Unit eigenvectors `(λⱼI − D)⁻¹û` as columns, one per root.
pub fn secular_eigenvectors(d: &[f64], uhat: &[f64], roots: &SecularRoots) -> DenseMatrix {
    let n = d.len();
    let mut xt = DenseMatrix::zeros(n, n);
    for j in 0..n {
        fill_eigenvector(d, uhat, roots, j, xt.row_mut(j));
    }
    xt.transpose()
}

/// Writes the normalized eigenvector for root `j` into `out`.
pub(crate) fn fill_eigenvector(d: &[f64], uhat: &[f64], roots: &SecularRoots, j: usize, out: &mut [f64]) {
    for (i, x) in out.iter_mut().enumerate() {
        *x = uhat[i] / roots.diff(d, j, i);
    }
    let nrm = norm2(out);
    if nrm > 0.0 && nrm.is_finite() {
        for x in out.iter_mut() {
            *x /= nrm;
        }
    }
}
