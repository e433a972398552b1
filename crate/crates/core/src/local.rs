//! Per-prime objects: the local sums `g_{j,p}`, their mixed moments
//! `A_{p,σ}(k, l)` and the local remainder series `R_{p,σ}`.
//!
//! Every `g_{j,p}(σ) = Σ_m c_m X^m` is a power series in the single variable
//! `X = X(p)` shared by all `j`. Products `P_k = Π_j g_j^{k_j}` are therefore
//! one-variable polynomials, and because `E[X^a X̄^b] = δ_{ab}` for `X`
//! uniform on the unit circle, `A(k, l) = Σ_a P_k[a] · conj(P_l[a])`.

use crate::error::{Error, Result};
use crate::lfunction::{beta_from_roots, LFunctionSpec, MAX_J};
use crate::rng::CounterRng;
use crate::series::dense::Basis;
use crate::series::{Monomial, TruncatedSeries};
use crate::sum::ComplexSum;
use num_complex::Complex64;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

/// Default tolerance for the dropped tail of each `g_{j,p}`.
pub const DEFAULT_TOL: f64 = 1e-15;

/// Largest `𝒦(k + l)` accepted by [`a_moment`].
pub const MAX_MOMENT_DEGREE: usize = 64;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Smallest `M` with `(d/(M+1)) q^{M+1} / (1 − q) < tol`, `q = p^{-(σ−η)}`.
pub fn power_cutoff(d: usize, eta: f64, p: u64, sigma: f64, tol: f64) -> Result<usize> {
    if !(sigma > eta) {
        return Err(Error::Convergence {
            sigma,
            floor: eta,
            what: "the local power series".into(),
        });
    }
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("tol must be positive, got {tol}")));
    }
    let q = (p as f64).powf(-(sigma - eta));
    let mut qm = q;
    for m in 1..100_000 {
        qm *= q;
        if d as f64 / (m + 1) as f64 * qm / (1.0 - q) < tol {
            return Ok(m);
        }
    }
    Err(Error::invalid("local power cutoff does not converge"))
}

/// `g_{j,p}(σ)` truncated after `M` powers of `X`.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalFactorPoly {
    pub p: u64,
    pub j: usize,
    pub sigma: f64,
    pub m: usize,
    /// `coeffs[m-1] = β_j(p^m) / p^{mσ}`.
    pub coeffs: Vec<Complex64>,
}

impl LocalFactorPoly {
    /// Horner evaluation at a point `X`.
    #[inline]
    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, c| (acc + c) * x)
    }

    /// Coefficients as a polynomial in `X` (index = power, index 0 is zero).
    pub fn as_poly(&self) -> Vec<Complex64> {
        std::iter::once(ZERO)
            .chain(self.coeffs.iter().copied())
            .collect()
    }
}

/// Builds `g_{j,p}` with the power cutoff chosen from `tol`.
pub fn g_poly(
    spec: &LFunctionSpec,
    j: usize,
    p: u64,
    sigma: f64,
    tol: f64,
) -> Result<LocalFactorPoly> {
    let m = power_cutoff(spec.degree(), spec.eta(), p, sigma, tol)?;
    let roots = spec.alpha(j, p)?;
    Ok(g_poly_with(&roots, j, p, sigma, m))
}

fn g_poly_with(roots: &[Complex64], j: usize, p: u64, sigma: f64, m: usize) -> LocalFactorPoly {
    let w = (p as f64).powf(-sigma);
    let mut wm = 1.0;
    let coeffs = (1..=m as u32)
        .map(|k| {
            wm *= w;
            beta_from_roots(roots, k) * wm
        })
        .collect();
    LocalFactorPoly {
        p,
        j,
        sigma,
        m,
        coeffs,
    }
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![ZERO; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == ZERO {
            continue;
        }
        for (k, &y) in b.iter().enumerate() {
            out[i + k] += x * y;
        }
    }
    out
}

/// Moment engine for one prime with cached products `P_k`.
#[derive(Debug, Clone)]
pub struct LocalMoments {
    p: u64,
    sigma: f64,
    g: Vec<Vec<Complex64>>,
    cache: HashMap<[u8; MAX_J], Vec<Complex64>>,
}

impl LocalMoments {
    pub fn new(spec: &LFunctionSpec, p: u64, sigma: f64, tol: f64) -> Result<Self> {
        let m = power_cutoff(spec.degree(), spec.eta(), p, sigma, tol)?;
        let g = (0..spec.j())
            .map(|j| Ok(g_poly_with(&spec.alpha(j, p)?, j, p, sigma, m).as_poly()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            p,
            sigma,
            g,
            cache: HashMap::new(),
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `P_k = Π_j g_j^{k_j}`, built as `P_{k − e_j} · g_j` with `j` the first
    /// nonzero slot so that the rounding is independent of query order.
    pub fn product(&mut self, k: [u8; MAX_J]) -> &[Complex64] {
        if !self.cache.contains_key(&k) {
            let value = match k.iter().position(|&e| e > 0) {
                None => vec![Complex64::new(1.0, 0.0)],
                Some(j) => {
                    let mut prev = k;
                    prev[j] -= 1;
                    let base = self.product(prev).to_vec();
                    poly_mul(&base, &self.g[j])
                }
            };
            self.cache.insert(k, value);
        }
        &self.cache[&k]
    }

    /// `A_{p,σ}(k, l)`.
    pub fn moment(&mut self, k: [u8; MAX_J], l: [u8; MAX_J]) -> Complex64 {
        if k == [0; MAX_J] && l == [0; MAX_J] {
            return Complex64::new(1.0, 0.0);
        }
        let pk = self.product(k).to_vec();
        let pl = self.product(l);
        let mut acc = ComplexSum::new();
        for (a, b) in pk.iter().zip(pl.iter()) {
            acc.add(a * b.conj());
        }
        acc.value()
    }

    /// Writes `R_{p,σ}` into dense storage over `basis`.
    pub fn remainder_into(&mut self, plan: &RemainderPlan, out: &mut [Complex64]) {
        out.iter_mut().for_each(|c| *c = ZERO);
        for &(idx, factor) in &plan.terms {
            let m = plan.basis.monomial(idx);
            out[idx] = factor * self.moment(m.k, m.l);
        }
    }
}

/// Monomials of `R` (both `k` and `l` nonzero) with their factors
/// `(πi)^{𝒦(k+l)} / (k! l!)`.
#[derive(Debug, Clone)]
pub struct RemainderPlan {
    pub basis: Arc<Basis>,
    pub terms: Vec<(usize, Complex64)>,
}

impl RemainderPlan {
    pub fn new(basis: Arc<Basis>) -> Self {
        let terms = (0..basis.len())
            .filter_map(|i| {
                let m = basis.monomial(i);
                (m.k_degree() > 0 && m.l_degree() > 0).then(|| (i, remainder_factor(&m)))
            })
            .collect();
        Self { basis, terms }
    }
}

fn remainder_factor(m: &Monomial) -> Complex64 {
    Complex64::new(0.0, PI).powu(m.degree() as u32) / m.factorial()
}

fn to_key(e: &[usize], j: usize) -> Result<[u8; MAX_J]> {
    if e.len() != j {
        return Err(Error::ShapeMismatch(format!(
            "expected {j} exponents, got {}",
            e.len()
        )));
    }
    let mut k = [0u8; MAX_J];
    for (d, s) in k.iter_mut().zip(e) {
        *d = u8::try_from(*s).map_err(|_| Error::invalid("exponent too large"))?;
    }
    Ok(k)
}

/// `A_{p,σ}(k, l) = E[Π_j g_{j,p}^{k_j} conj(g_{j,p})^{l_j}]`.
pub fn a_moment(
    spec: &LFunctionSpec,
    p: u64,
    sigma: f64,
    k: &[usize],
    l: &[usize],
    tol: f64,
) -> Result<Complex64> {
    let degree: usize = k.iter().chain(l).sum();
    if degree > MAX_MOMENT_DEGREE {
        return Err(Error::DegreeOutOfRange {
            degree,
            cutoff: MAX_MOMENT_DEGREE,
        });
    }
    let (kk, ll) = (to_key(k, spec.j())?, to_key(l, spec.j())?);
    Ok(LocalMoments::new(spec, p, sigma, tol)?.moment(kk, ll))
}

/// The local remainder `R_{p,σ}(z) = φ_{p,σ} − 1` as a series up to degree `N`.
pub fn r_series(
    spec: &LFunctionSpec,
    p: u64,
    sigma: f64,
    cutoff: usize,
    tol: f64,
) -> Result<TruncatedSeries> {
    if cutoff < 2 {
        return Err(Error::invalid("R needs cutoff N >= 2"));
    }
    let plan = RemainderPlan::new(Basis::new(spec.j(), cutoff));
    let mut lm = LocalMoments::new(spec, p, sigma, tol)?;
    let mut dense = vec![ZERO; plan.basis.len()];
    lm.remainder_into(&plan, &mut dense);
    plan.basis.to_sparse(&dense)
}

/// `g_{j,p}(σ)` at `X` in closed form, `−Σ_i log(1 − α_i X p^{-σ})`,
/// without any power truncation.
pub fn g_closed_form(roots: &[Complex64], p: u64, sigma: f64, x: Complex64) -> Complex64 {
    let w = (p as f64).powf(-sigma);
    roots
        .iter()
        .map(|a| -(Complex64::new(1.0, 0.0) - a * x * w).ln())
        .sum()
}

/// Monte Carlo estimates of `A_{p,σ}(k, l)` for several `(k, l)` from one
/// set of draws. `g` is evaluated in closed form, so the estimate shares no
/// code with the polynomial route. Returns `(mean, stderr)` per pair, where
/// `stderr` is the standard error of the complex mean.
pub fn mc_moment_oracle_batch(
    spec: &LFunctionSpec,
    p: u64,
    sigma: f64,
    pairs: &[(Vec<usize>, Vec<usize>)],
    n_samples: usize,
    seed: u64,
) -> Result<Vec<(Complex64, f64)>> {
    if n_samples < 1000 {
        return Err(Error::invalid(
            "mc_moment_oracle needs at least 1000 samples",
        ));
    }
    if !(sigma > spec.eta()) {
        return Err(Error::Convergence {
            sigma,
            floor: spec.eta(),
            what: "the local factor".into(),
        });
    }
    let keys = pairs
        .iter()
        .map(|(k, l)| Ok((to_key(k, spec.j())?, to_key(l, spec.j())?)))
        .collect::<Result<Vec<_>>>()?;
    let roots = (0..spec.j())
        .map(|j| spec.alpha(j, p))
        .collect::<Result<Vec<_>>>()?;
    let mut rng = CounterRng::new(seed, p);
    let mut sums = vec![ComplexSum::new(); keys.len()];
    let mut sq = vec![crate::sum::NeumaierSum::new(); keys.len()];
    let mut g = vec![ZERO; spec.j()];
    for _ in 0..n_samples {
        let x = rng.unit_circle();
        for (gj, r) in g.iter_mut().zip(&roots) {
            *gj = g_closed_form(r, p, sigma, x);
        }
        for (i, (k, l)) in keys.iter().enumerate() {
            let mut y = Complex64::new(1.0, 0.0);
            for j in 0..spec.j() {
                y *= g[j].powu(k[j] as u32) * g[j].conj().powu(l[j] as u32);
            }
            sums[i].add(y);
            sq[i].add(y.norm_sqr());
        }
    }
    let n = n_samples as f64;
    Ok(sums
        .iter()
        .zip(&sq)
        .map(|(s, q)| {
            let mean = s.value() / n;
            let var = ((q.value() - n * mean.norm_sqr()) / (n - 1.0)).max(0.0);
            (mean, (var / n).sqrt())
        })
        .collect())
}

/// Single-pair form of [`mc_moment_oracle_batch`].
pub fn mc_moment_oracle(
    spec: &LFunctionSpec,
    p: u64,
    sigma: f64,
    k: &[usize],
    l: &[usize],
    n_samples: usize,
    seed: u64,
) -> Result<(Complex64, f64)> {
    Ok(mc_moment_oracle_batch(spec, p, sigma, &[(k.to_vec(), l.to_vec())], n_samples, seed)?[0])
}

/// `φ_{p,σ}(x, y) = E[exp(2πi Σ_j (x_j Re g_j + y_j Im g_j))]` by the
/// trapezoidal rule with `nodes` points on the unit circle. The integrand is
/// smooth and periodic, so the rule converges geometrically.
pub fn local_char_quadrature(
    spec: &LFunctionSpec,
    p: u64,
    sigma: f64,
    x: &[f64],
    y: &[f64],
    nodes: usize,
) -> Result<Complex64> {
    let roots = (0..spec.j())
        .map(|j| spec.alpha(j, p))
        .collect::<Result<Vec<_>>>()?;
    let mut acc = ComplexSum::new();
    for i in 0..nodes {
        let xp = Complex64::from_polar(1.0, 2.0 * PI * i as f64 / nodes as f64);
        let mut phase = 0.0;
        for (j, r) in roots.iter().enumerate() {
            let g = g_closed_form(r, p, sigma, xp);
            phase += x[j] * g.re + y[j] * g.im;
        }
        acc.add(Complex64::from_polar(1.0, 2.0 * PI * phase));
    }
    Ok(acc.value() / nodes as f64)
}

/// Largest `|R_{p,σ}(z)| = |φ_{p,σ}(z) − 1|` over every prime `p ≤ p_limit`
/// and `n_points` random `z` with `‖z‖ ≤ δ₁` (half of them on the sphere).
/// Fails when it exceeds `1/2`.
pub fn delta1_check(
    spec: &LFunctionSpec,
    sigma: f64,
    delta1: f64,
    p_limit: u64,
    n_points: usize,
    seed: u64,
) -> Result<f64> {
    let jn = spec.j();
    let mut rng = CounterRng::new(seed, u64::MAX);
    let points: Vec<(Vec<f64>, Vec<f64>)> = (0..n_points)
        .map(|i| {
            // Box–Muller directions, radius uniform in the ball for odd i.
            let mut v: Vec<f64> = (0..2 * jn)
                .map(|_| {
                    let (u1, u2) = (1.0 - rng.next_f64(), rng.next_f64());
                    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
                })
                .collect();
            let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
            let r = if i % 2 == 0 {
                delta1
            } else {
                delta1 * rng.next_f64().powf(1.0 / (2 * jn) as f64)
            };
            v.iter_mut().for_each(|t| *t *= r / norm);
            let y = v.split_off(jn);
            (v, y)
        })
        .collect();
    let mut worst: f64 = 0.0;
    for p in crate::primes::primes_up_to(p_limit) {
        for (x, y) in &points {
            let phi = local_char_quadrature(spec, p, sigma, x, y, 64)?;
            worst = worst.max((phi - 1.0).norm());
        }
    }
    if worst > 0.5 {
        return Err(Error::invalid(format!(
            "delta1 = {delta1} is too large: |R_p(z)| reaches {worst}"
        )));
    }
    Ok(worst)
}

/// `(Σ_m max_j |β_j(p^m)| p^{-mσ})^{𝒦}`, the moment bound for degree `𝒦`.
pub fn moment_bound(
    spec: &LFunctionSpec,
    p: u64,
    sigma: f64,
    degree: usize,
    tol: f64,
) -> Result<f64> {
    let m = power_cutoff(spec.degree(), spec.eta(), p, sigma, tol)?;
    let mut s = 0.0;
    for k in 1..=m as u32 {
        let mut best: f64 = 0.0;
        for j in 0..spec.j() {
            best = best.max(beta_from_roots(&spec.alpha(j, p)?, k).norm());
        }
        s += best * (p as f64).powf(-(k as f64) * sigma);
    }
    Ok((s * (1.0 + 1e-12) + tol).powi(degree as i32))
}
