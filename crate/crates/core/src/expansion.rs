//! Global assembly: prime sums of the local logarithms, the quadratic split
//! into `Q_T` plus a Hermitian form `C`, and the coefficient table `b_{k,l}`.
//!
//! The pipeline is
//!
//! 1. `B_σ = Σ_{p ≤ P} log(1 + R_{p,σ})` as a truncated series
//!    ([`log_char_series`]);
//! 2. its degree-2 part split as `−π² Σ ψ_j |z_j|² + Σ C_{j₁j₂} z̄_{j₁} z_{j₂}`
//!    ([`quadratic_split`]), with `C` a finite-`T` surrogate built from the
//!    same prime sums;
//! 3. `S = I_2^C + Σ_{n≥3} I_n` rewritten in `x, y` (`z = x + iy`), each
//!    degree-`n` part scaled by `(2πi)^{-n}`, and exponentiated. The
//!    coefficient of `x^k y^l` in the result is `b_{k,l}` ([`b_table`]).

use crate::error::{Error, Result};
use crate::lfunction::{LFunctionSpec, ScaleParams};
use crate::local::{LocalMoments, RemainderPlan, DEFAULT_TOL};
use crate::parallel::map_chunks;
use crate::primes::primes_up_to;
use crate::series::dense::Basis;
use crate::series::{Monomial, TruncatedSeries};
use crate::special::prime_power_tail_estimate;
use crate::sum::ComplexSum;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::Path;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Primes per work unit in the prime sums. Fixed so that the reduction
/// order never depends on the worker count.
const PRIME_CHUNK: usize = 2048;

/// Imaginary residue above which a coefficient is not accepted as real.
pub const REALITY_LIMIT: f64 = 1e-12;
/// Primes on which [`b_table`] re-validates `δ₁` before building.
const DELTA1_PRIMES: u64 = 100;

/// Where the homogeneous parts of degree `≥ 3` are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    SigmaT,
    Half,
}

/// Treatment of the degree-2 prime sum beyond `P_max`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimeTail {
    /// Use the sum over `p ≤ P_max` as is.
    Truncate,
    /// Add the prime-number-theorem estimate of `Σ_{p > P_max} |β_j(p)|² p^{-2σ}`
    /// to the diagonal.
    Complete,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionConfig {
    /// Total-degree cutoff `N` of the table.
    pub cutoff: usize,
    /// Prime cutoff of every sum over `p`.
    pub p_max: u64,
    /// Tail tolerance of the local series `g_{j,p}`.
    pub tol: f64,
    pub sigma_mode: SigmaMode,
    pub prime_tail: PrimeTail,
    /// Radius for the `|R_p| ≤ 1/2` check.
    pub delta1: f64,
    /// Radius inside which the truncated characteristic function is used.
    pub delta2: f64,
    /// Envelope radius; defaults to `0.9 π δ₂ / √J`.
    pub delta3: Option<f64>,
    /// Inversion radius; defaults to `δ₂`.
    pub delta4: Option<f64>,
}

impl Default for ExpansionConfig {
    fn default() -> Self {
        Self {
            cutoff: 8,
            p_max: 1_000_000,
            tol: DEFAULT_TOL,
            sigma_mode: SigmaMode::SigmaT,
            prime_tail: PrimeTail::Truncate,
            delta1: 0.05,
            delta2: 0.05,
            delta3: None,
            delta4: None,
        }
    }
}

impl ExpansionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.cutoff < 2 || self.cutoff > 24 {
            return Err(Error::invalid(format!(
                "cutoff N must be in 2..=24, got {}",
                self.cutoff
            )));
        }
        if self.p_max < 1000 {
            return Err(Error::invalid(format!(
                "P_max must be at least 1000, got {}",
                self.p_max
            )));
        }
        if self.p_max > 100_000_000 {
            return Err(Error::invalid(format!(
                "P_max is capped at 1e8, got {}",
                self.p_max
            )));
        }
        if !(self.tol > 0.0 && self.tol < 1e-6) {
            return Err(Error::invalid(format!(
                "tol must be in (0, 1e-6), got {}",
                self.tol
            )));
        }
        for (name, v) in [
            ("delta1", Some(self.delta1)),
            ("delta2", Some(self.delta2)),
            ("delta3", self.delta3),
            ("delta4", self.delta4),
        ] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    return Err(Error::invalid(format!("{name} must be positive, got {v}")));
                }
            }
        }
        Ok(())
    }

    pub fn delta3(&self, j: usize) -> f64 {
        self.delta3
            .unwrap_or(0.9 * PI * self.delta2 / (j as f64).sqrt())
    }

    pub fn delta4(&self) -> f64 {
        self.delta4.unwrap_or(self.delta2)
    }
}

/// `Σ_p log(1 + R_{p,σ})` together with per-degree tail bounds.
#[derive(Debug, Clone)]
pub struct LogCharSeries {
    pub sigma: f64,
    pub series: TruncatedSeries,
    /// `tail_bounds[n]` bounds the `p > P_max` part of any degree-`n`
    /// coefficient (integral test against the envelope `(2πd)^n p^{-n(σ-η)}`;
    /// `None` where that diverges).
    pub tail_bounds: Vec<Option<f64>>,
    pub prime_count: usize,
}

/// `B_σ` for all degrees `2..=N`. Requires `σ > 1/2`.
pub fn log_char_series(
    spec: &LFunctionSpec,
    sigma: f64,
    config: &ExpansionConfig,
) -> Result<LogCharSeries> {
    log_char_series_from(spec, sigma, config, 2)
}

/// `B_σ` restricted to degrees `min_degree..=N`.
///
/// Degree 2 needs `σ > 1/2`; degrees `≥ 3` converge for
/// `σ ≥ (5 + 2η)/12`, which admits `σ = 1/2`.
pub fn log_char_series_from(
    spec: &LFunctionSpec,
    sigma: f64,
    config: &ExpansionConfig,
    min_degree: usize,
) -> Result<LogCharSeries> {
    config.validate()?;
    let eta = spec.eta();
    if min_degree <= 2 && !(sigma > 0.5) {
        return Err(Error::Convergence {
            sigma,
            floor: 0.5,
            what: "the degree-2 prime sum".into(),
        });
    }
    let floor = (5.0 + 2.0 * eta) / 12.0;
    if sigma < floor {
        return Err(Error::Convergence {
            sigma,
            floor,
            what: "the degree >= 3 prime sums".into(),
        });
    }

    let basis = Basis::new(spec.j(), config.cutoff);
    let plan = RemainderPlan::new(basis.clone());
    let primes = primes_up_to(config.p_max);
    let n = basis.len();

    let partials = map_chunks(
        primes.len(),
        PRIME_CHUNK,
        |range| -> Result<Vec<ComplexSum>> {
            let mut acc = vec![ComplexSum::new(); n];
            let mut r = vec![ZERO; n];
            let mut out = vec![ZERO; n];
            let (mut power, mut work) = (Vec::new(), Vec::new());
            for &p in &primes[range] {
                let mut lm = LocalMoments::new(spec, p, sigma, config.tol)?;
                lm.remainder_into(&plan, &mut r);
                basis.log1p(&r, &mut out, &mut power, &mut work);
                for (a, o) in acc.iter_mut().zip(&out) {
                    if *o != ZERO {
                        a.add(*o);
                    }
                }
            }
            Ok(acc)
        },
    );
    let mut total = vec![ComplexSum::new(); n];
    for part in partials {
        for (t, s) in total.iter_mut().zip(&part?) {
            t.merge(s);
        }
    }
    let dense: Vec<Complex64> = total
        .iter()
        .enumerate()
        .map(|(i, s)| {
            if basis.degree(i) >= min_degree {
                s.value()
            } else {
                ZERO
            }
        })
        .collect();

    let d = spec.degree() as f64;
    let s = sigma - eta;
    let pf = config.p_max as f64;
    let tail_bounds = (0..=config.cutoff)
        .map(|deg| {
            let e = deg as f64 * s;
            if deg < min_degree {
                Some(0.0)
            } else if e > 1.0 {
                Some((2.0 * PI * d).powi(deg as i32) * pf.powf(1.0 - e) / (e - 1.0))
            } else {
                None
            }
        })
        .collect();

    Ok(LogCharSeries {
        sigma,
        series: basis.to_sparse(&dense)?,
        tail_bounds,
        prime_count: primes.len(),
    })
}

pub type CMatrix = Vec<Vec<Complex64>>;

/// Result of [`quadratic_split`].
#[derive(Debug, Clone)]
pub struct QuadraticSplit {
    pub scale: ScaleParams,
    /// `D_{j₁j₂}(σ_T) = Σ_p Σ_m β_{j₁}(p^m) conj(β_{j₂}(p^m)) p^{-2mσ_T}`,
    /// including the tail completion when enabled.
    pub d: CMatrix,
    /// `C_{jj} = −π²(D_{jj} − ψ_j)`, `C_{j₁j₂} = −π² D_{j₁j₂}`, Hermitian.
    pub c: CMatrix,
    /// `max |C − C^*|` before symmetrisation.
    pub hermiticity_residual: f64,
    /// Amount added to each `D_{jj}` by [`PrimeTail::Complete`].
    pub tail_completion: Vec<f64>,
}

/// Splits the degree-2 part of `B_{σ_T}` into `Q_T` and the form `C`.
pub fn quadratic_split(
    spec: &LFunctionSpec,
    theta: f64,
    log_t: f64,
    config: &ExpansionConfig,
) -> Result<QuadraticSplit> {
    let scale = ScaleParams::new(spec, theta, log_t)?;
    let mut quad_cfg = config.clone();
    quad_cfg.cutoff = 2;
    let series = log_char_series(spec, scale.sigma_t, &quad_cfg)?;
    split_from_series(spec, scale, &series, config)
}

fn split_from_series(
    spec: &LFunctionSpec,
    scale: ScaleParams,
    series: &LogCharSeries,
    config: &ExpansionConfig,
) -> Result<QuadraticSplit> {
    let jn = spec.j();
    let pi2 = PI * PI;
    let mut d = vec![vec![ZERO; jn]; jn];
    for (j1, row) in d.iter_mut().enumerate() {
        for (j2, v) in row.iter_mut().enumerate() {
            let mut m = Monomial::ONE;
            m.k[j1] = 1;
            m.l[j2] = 1;
            *v = -series.series.get(&m) / pi2;
        }
    }
    let tail_completion = match config.prime_tail {
        PrimeTail::Truncate => vec![0.0; jn],
        PrimeTail::Complete => diagonal_tail_estimate(spec, scale.sigma_t, config.p_max)?,
    };
    for j in 0..jn {
        d[j][j] += tail_completion[j];
    }
    let mut c = vec![vec![ZERO; jn]; jn];
    for j1 in 0..jn {
        for j2 in 0..jn {
            let shift = if j1 == j2 { scale.psi[j1] } else { 0.0 };
            c[j1][j2] = -pi2 * (d[j1][j2] - shift);
        }
    }
    let mut residual: f64 = 0.0;
    for j1 in 0..jn {
        for j2 in 0..jn {
            residual = residual.max((c[j1][j2] - c[j2][j1].conj()).norm());
        }
    }
    let mut herm = c.clone();
    for j1 in 0..jn {
        for j2 in 0..jn {
            herm[j1][j2] = (c[j1][j2] + c[j2][j1].conj()) * 0.5;
        }
    }
    Ok(QuadraticSplit {
        scale,
        d,
        c: herm,
        hermiticity_residual: residual,
        tail_completion,
    })
}

/// `ĉ_j · Σ_{p > P} p^{-2σ}`, where `ĉ_j` is the mean of `|β_j(p)|²` over
/// the primes in `(P/2, P]` and the prime sum is the logarithmic-integral
/// estimate `E₁((2σ − 1) log P)`.
pub fn diagonal_tail_estimate(spec: &LFunctionSpec, sigma: f64, p_max: u64) -> Result<Vec<f64>> {
    let block: Vec<u64> = primes_up_to(p_max)
        .into_iter()
        .filter(|&p| p > p_max / 2)
        .collect();
    if block.is_empty() {
        return Err(Error::invalid("no primes in the completion block"));
    }
    let tail = prime_power_tail_estimate(2.0 * sigma, p_max as f64);
    (0..spec.j())
        .map(|j| {
            let m = spec.member(j)?;
            let mean = block
                .iter()
                .map(|&p| crate::lfunction::beta_from_roots(&m.roots(p), 1).norm_sqr())
                .sum::<f64>()
                / block.len() as f64;
            Ok(mean * tail)
        })
        .collect()
}

/// One stored coefficient `b_{k,l}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffEntry {
    pub k: Vec<u8>,
    pub l: Vec<u8>,
    pub value: f64,
}

impl CoeffEntry {
    pub fn degree(&self) -> usize {
        self.k.iter().chain(&self.l).map(|&e| e as usize).sum()
    }
}

/// The coefficient table with everything needed to reproduce it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoeffTable {
    pub spec: String,
    pub j: usize,
    pub theta: f64,
    pub log_t: f64,
    pub sigma_t: f64,
    pub psi: Vec<f64>,
    pub c_matrix: CMatrix,
    pub config: ExpansionConfig,
    /// Graded order: by degree, then lexicographic in `(k, l)`.
    pub entries: Vec<CoeffEntry>,
    pub max_imag_residue: f64,
    pub hermiticity_residual: f64,
    /// Per-degree bounds on the omitted primes, see [`LogCharSeries`].
    pub tail_bounds: Vec<Option<f64>>,
    pub tail_completion: Vec<f64>,
}

impl CoeffTable {
    /// `b_{k,l}`, zero when not stored.
    pub fn get(&self, k: &[usize], l: &[usize]) -> f64 {
        self.entries
            .iter()
            .find(|e| {
                e.k.iter().map(|&x| x as usize).eq(k.iter().copied())
                    && e.l.iter().map(|&x| x as usize).eq(l.iter().copied())
            })
            .map_or(0.0, |e| e.value)
    }

    pub fn max_degree(&self) -> usize {
        self.entries
            .iter()
            .map(CoeffEntry::degree)
            .max()
            .unwrap_or(0)
    }

    /// The same table restricted to degrees `≤ n`.
    pub fn restricted(&self, n: usize) -> Self {
        let mut t = self.clone();
        t.entries.retain(|e| e.degree() <= n);
        t
    }

    /// Mutable access to one coefficient (inserting it if absent).
    pub fn set(&mut self, k: &[usize], l: &[usize], value: f64) {
        let key = |e: &CoeffEntry| {
            (
                e.degree(),
                e.k.iter().map(|&x| x as usize).collect::<Vec<_>>(),
                e.l.iter().map(|&x| x as usize).collect::<Vec<_>>(),
            )
        };
        let target = (k.iter().chain(l).sum::<usize>(), k.to_vec(), l.to_vec());
        match self.entries.iter_mut().find(|e| key(e) == target) {
            Some(e) => e.value = value,
            None => {
                self.entries.push(CoeffEntry {
                    k: k.iter().map(|&x| x as u8).collect(),
                    l: l.iter().map(|&x| x as u8).collect(),
                    value,
                });
                self.entries.sort_by_key(key);
            }
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

/// Builds the table from `ψ`, the form `C` and the homogeneous parts of
/// degree `≥ 3` (any lower-degree terms in `higher` are ignored).
#[allow(clippy::too_many_arguments)]
pub fn assemble_table(
    spec_label: &str,
    scale: &ScaleParams,
    c: &CMatrix,
    higher: &TruncatedSeries,
    config: &ExpansionConfig,
    hermiticity_residual: f64,
    tail_bounds: Vec<Option<f64>>,
    tail_completion: Vec<f64>,
) -> Result<CoeffTable> {
    let jn = higher.j();
    let n = config.cutoff;
    let mut s = TruncatedSeries::zero(jn, n)?;
    for (j1, row) in c.iter().enumerate() {
        for (j2, v) in row.iter().enumerate() {
            let mut m = Monomial::ONE;
            m.k[j1] = 1;
            m.l[j2] = 1;
            s.add_term(m, *v)?;
        }
    }
    for (m, v) in higher.iter() {
        if m.degree() >= 3 && m.degree() <= n {
            s.add_term(*m, *v)?;
        }
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let g = s
        .to_real_coordinates()
        .scale_by_degree(|deg| two_pi_i.powi(-(deg as i32)))
        .exp()?;

    let mut worst = (0.0f64, Monomial::ONE);
    let mut items: Vec<(Monomial, f64)> = Vec::with_capacity(g.len());
    for (m, v) in g.iter() {
        if v.im.abs() > worst.0 {
            worst = (v.im.abs(), *m);
        }
        if v.re != 0.0 || *m == Monomial::ONE {
            items.push((*m, v.re));
        }
    }
    if worst.0 >= REALITY_LIMIT {
        return Err(Error::Reality {
            key: format!("{} | {}", worst.1.k_tuple(jn), worst.1.l_tuple(jn)),
            residue: worst.0,
            limit: REALITY_LIMIT,
        });
    }
    items.sort_by_key(|(m, _)| m.graded_key());
    let entries = items
        .into_iter()
        .map(|(m, value)| CoeffEntry {
            k: m.k[..jn].to_vec(),
            l: m.l[..jn].to_vec(),
            value,
        })
        .collect();

    Ok(CoeffTable {
        spec: spec_label.to_string(),
        j: jn,
        theta: scale.theta,
        log_t: scale.log_t,
        sigma_t: scale.sigma_t,
        psi: scale.psi.clone(),
        c_matrix: c.clone(),
        config: config.clone(),
        entries,
        max_imag_residue: worst.0,
        hermiticity_residual,
        tail_bounds,
        tail_completion,
    })
}

/// Homogeneous parts of degree `≥ 3` at the configured `σ`.
pub fn higher_parts(
    spec: &LFunctionSpec,
    scale: &ScaleParams,
    config: &ExpansionConfig,
) -> Result<LogCharSeries> {
    let sigma = match config.sigma_mode {
        SigmaMode::SigmaT => scale.sigma_t,
        SigmaMode::Half => 0.5,
    };
    log_char_series_from(spec, sigma, config, 3)
}

/// The coefficient table `b_{k,l}` for `θ`, `log T`.
pub fn b_table(
    spec: &LFunctionSpec,
    theta: f64,
    log_t: f64,
    config: &ExpansionConfig,
) -> Result<CoeffTable> {
    config.validate()?;
    let scale = ScaleParams::new(spec, theta, log_t)?;
    crate::local::delta1_check(spec, scale.sigma_t, config.delta1, DELTA1_PRIMES, 32, 0)?;
    let (split, higher) = match config.sigma_mode {
        SigmaMode::SigmaT => {
            let full = log_char_series(spec, scale.sigma_t, config)?;
            let split = split_from_series(spec, scale.clone(), &full, config)?;
            (split, full)
        }
        SigmaMode::Half => {
            let split = quadratic_split(spec, theta, log_t, config)?;
            (split, higher_parts(spec, &scale, config)?)
        }
    };
    assemble_table(
        &spec.label(),
        &scale,
        &split.c,
        &higher.series,
        config,
        split.hermiticity_residual,
        higher.tail_bounds.clone(),
        split.tail_completion.clone(),
    )
}

/// Result of [`coefficient_envelope`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    /// Smallest constant with `|b| ≤ fit_c · fit_r^{-𝒦}` for every entry.
    pub fit_c: f64,
    pub fit_r: f64,
    /// Least-squares intercept before covering.
    pub ls_c: f64,
    /// Largest `|b| / (ls_c · fit_r^{-𝒦})` over the entries.
    pub ls_max_ratio: f64,
    /// Largest excess of `|b|` over the covering envelope (zero up to rounding).
    pub max_violation: f64,
}

/// Fits `log|b|` against `𝒦(k+l)` over the nonzero entries of degree `≥ 2`.
pub fn coefficient_envelope(table: &CoeffTable) -> Result<Envelope> {
    if table.config.cutoff < 6 {
        return Err(Error::invalid(
            "envelope fit needs a table of degree at least 6",
        ));
    }
    let pts: Vec<(f64, f64)> = table
        .entries
        .iter()
        .filter(|e| e.degree() >= 2 && e.value != 0.0)
        .map(|e| (e.degree() as f64, e.value.abs().ln()))
        .collect();
    if !pts.iter().any(|(d, _)| *d > 2.0) {
        return Err(Error::DegenerateFit(
            "no nonzero coefficients beyond degree 2".into(),
        ));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::DegenerateFit(
            "all coefficients share one degree".into(),
        ));
    }
    let slope = sxy / sxx;
    let fit_r = (-slope).exp();
    let ls_c = (my - slope * mx).exp();
    let ratio = |c: f64| {
        pts.iter()
            .map(|(d, lb)| lb.exp() / (c * fit_r.powf(-d)))
            .fold(0.0, f64::max)
    };
    let ls_max_ratio = ratio(ls_c);
    let fit_c = ls_c * ls_max_ratio;
    let max_violation = pts
        .iter()
        .map(|(d, lb)| (lb.exp() - fit_c * fit_r.powf(-d)).max(0.0))
        .fold(0.0, f64::max);
    Ok(Envelope {
        fit_c,
        fit_r,
        ls_c,
        ls_max_ratio,
        max_violation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExpansionConfig {
        ExpansionConfig {
            cutoff: 6,
            p_max: 2000,
            ..Default::default()
        }
    }

    #[test]
    fn structure_of_small_table() {
        let t = b_table(&LFunctionSpec::zeta(), 0.4, 1e4, &small()).unwrap();
        assert_eq!(t.entries[0].value, 1.0);
        assert_eq!(t.get(&[0], &[0]), 1.0);
        assert!(t.entries.iter().all(|e| e.degree() != 1));
        assert!(t.max_imag_residue < REALITY_LIMIT);
        assert_eq!(t.get(&[1], &[1]), 0.0);
        let d = -t.c_matrix[0][0].re / (PI * PI) + t.psi[0];
        assert!((t.get(&[2], &[0]) - (d - t.psi[0]) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn json_round_trip_is_exact() {
        let t = b_table(&LFunctionSpec::zeta(), 0.3, 1e3, &small()).unwrap();
        let back = CoeffTable::from_json(&t.to_json().unwrap()).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn config_validation() {
        let mut c = small();
        c.cutoff = 1;
        assert!(c.validate().is_err());
        c = small();
        c.p_max = 10;
        assert!(c.validate().is_err());
        assert!(log_char_series(&LFunctionSpec::zeta(), 0.5, &small()).is_err());
        assert!(log_char_series_from(&LFunctionSpec::zeta(), 0.5, &small(), 3).is_ok());
    }

    #[test]
    fn envelope_degenerate() {
        let mut t = b_table(&LFunctionSpec::zeta(), 0.4, 1e4, &small()).unwrap();
        t.entries.truncate(1);
        assert!(matches!(
            coefficient_envelope(&t),
            Err(Error::DegenerateFit(_))
        ));
    }
}
