//! Riemann zeta on vertical strips and empirical sampling of `log ζ(σ_T + it)`.
//!
//! `ζ(s)` is evaluated by Euler–Maclaurin summation. The head sum
//! `Σ_{n<N} n^{-s}` is generated in short blocks where `n^{-s}` is the
//! exponential of a quartic in the offset, so a block costs a handful of
//! complex multiplications per term and one `sin_cos` per block. Several
//! abscissae at the same height share the phase recurrence.

use crate::distribution::Rectangle;
use crate::error::{Error, Result};
use crate::lfunction::{psi_jt, sigma_t, LFunctionSpec};
use crate::parallel::map_chunks;
use crate::rng::CounterRng;
use crate::special::gaussian_cdf;
use crate::stats::ks_statistic;
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;
use std::sync::OnceLock;

/// Largest height accepted by [`zeta_eval`].
pub const MAX_HEIGHT: f64 = 1e9;
/// Above this abscissa `|arg ζ| ≤ log ζ(σ) < π/2`, so the principal branch
/// is the continuous one and no stitching is needed.
pub const SIGMA_PIN: f64 = 1.27;
/// Start of the continuation path.
pub const SIGMA_START: f64 = 3.0;

const MAX_CORRECTIONS: usize = 60;
const BLOCK_MAX: usize = 256;
const BLOCK_MIN: usize = 8;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `B_{2k} / (2k)!` for `k = 1..=MAX_CORRECTIONS`, via `ζ(2k)`.
fn bernoulli_ratios() -> &'static [f64] {
    static TABLE: OnceLock<Vec<f64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (1..=MAX_CORRECTIONS)
            .map(|k| {
                let e = 2 * k as i32;
                let zeta = if k == 1 {
                    PI * PI / 6.0
                } else {
                    let m = 1000.0f64;
                    let head: f64 = (1..1000).rev().map(|n| (n as f64).powi(-e)).sum();
                    head + m.powi(1 - e) / (e as f64 - 1.0) + 0.5 * m.powi(-e)
                };
                let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
                sign * 2.0 * zeta / TAU.powi(e)
            })
            .collect()
    })
}

/// `N^{1-s}/(s-1) + N^{-s}/2 + Σ_k B_{2k}/(2k)! s(s+1)…(s+2k-2) N^{-s-2k+1}`,
/// or `None` when the corrections do not drop below `tol`.
fn em_tail(s: Complex64, n: u64, tol: f64) -> Option<Complex64> {
    let nf = n as f64;
    let ln_n = nf.ln();
    let n_s = (-s * ln_n).exp();
    let mut total = n_s * nf / (s - 1.0) + 0.5 * n_s;
    let mut rising = s;
    let mut power = n_s / nf;
    let inv_n2 = 1.0 / (nf * nf);
    let mut previous = f64::INFINITY;
    for (k, &c) in bernoulli_ratios().iter().enumerate() {
        let term = rising * power * c;
        let size = term.norm();
        total += term;
        if size <= 0.5 * tol {
            return Some(total);
        }
        if size > previous && k > 2 {
            return None;
        }
        previous = size;
        let a = 2.0 * k as f64 + 1.0;
        rising *= (s + a) * (s + a + 1.0);
        power *= inv_n2;
    }
    None
}

/// Smallest `N` (on a geometric grid) for which the corrections converge.
fn choose_n(s: Complex64, tol: f64) -> Result<u64> {
    let mut n = ((s.norm() / TAU).ceil() as u64).max(10);
    for _ in 0..200 {
        if em_tail(s, n, tol).is_some() {
            return Ok(n);
        }
        n = n + n / 8 + 1;
    }
    Err(Error::Precision(format!(
        "no Euler-Maclaurin cutoff reaches {tol:e} at s = {s}"
    )))
}

/// `1 + ∫_1^N x^{-2σ} dx`, a bound on `Σ_{n<N} n^{-2σ}`.
fn square_sum_bound(sigma: f64, n: f64) -> f64 {
    let e = 1.0 - 2.0 * sigma;
    if e.abs() < 1e-12 {
        1.0 + n.ln()
    } else {
        1.0 + (n.powf(e) - 1.0) / e
    }
}

/// Rounding envelope of the head sum: every phase `t log n` carries an
/// absolute error of about one ulp of itself, and the errors add like a random walk.
fn rounding_error(sigma: f64, t: f64, n: u64) -> f64 {
    let nf = n as f64;
    f64::EPSILON * (t.abs() * nf.ln() + 1.0) * square_sum_bound(sigma, nf).sqrt()
}

/// `Σ_{n=1}^{count} n^{-σ_j - it}` for every `σ_j`.
///
/// `tol` bounds the relative error of each generated term.
fn head_sums(sigmas: &[f64], t: f64, count: u64, tol: f64) -> Vec<Complex64> {
    sigmas
        .chunks(LANES)
        .flat_map(|group| {
            let mut lanes = [0.0; LANES];
            lanes[..group.len()].copy_from_slice(group);
            let sums = head_sums_lanes(&lanes, t, count, tol);
            sums.into_iter().take(group.len())
        })
        .collect()
}

const LANES: usize = 4;

/// `e^y`, by its Taylor polynomial when `|y|` is tiny.
#[inline]
fn exp_small(y: f64) -> f64 {
    if y.abs() < 1e-3 {
        1.0 + y * (1.0 + y / 2.0 * (1.0 + y / 3.0 * (1.0 + y / 4.0 * (1.0 + y / 5.0))))
    } else {
        y.exp()
    }
}

/// `e^{ia}`, by Taylor polynomials when `|a|` is small.
#[inline]
fn cis(a: f64) -> Complex64 {
    if a.abs() < 1e-2 {
        let a2 = a * a;
        let c = 1.0 - a2 / 2.0 * (1.0 - a2 / 12.0 * (1.0 - a2 / 30.0 * (1.0 - a2 / 56.0)));
        let s = a * (1.0 - a2 / 6.0 * (1.0 - a2 / 20.0 * (1.0 - a2 / 42.0 * (1.0 - a2 / 72.0))));
        Complex64::new(c, s)
    } else {
        let (s, c) = a.sin_cos();
        Complex64::new(c, s)
    }
}

fn head_sums_lanes(sigmas: &[f64; LANES], t: f64, count: u64, tol: f64) -> [Complex64; LANES] {
    let s_max = sigmas.iter().fold(0.0f64, |m, s| m.max(s.abs())).hypot(t);
    // Dropping x^5/5 from log(1 + x) costs |s| x^5 / 5 in the exponent.
    let ratio = (5.0 * tol / s_max.max(1e-300)).powf(0.2);
    // Rounding in the fourth difference grows like m^4/24 ulps.
    let cap = ((24.0 * tol / f64::EPSILON).powf(0.25) as u64).min(BLOCK_MAX as u64);
    let mut acc = [ZERO; LANES];
    let mut n = 1u64;
    while n <= count {
        let len = ((n as f64 * ratio) as u64).min(cap).min(count - n + 1) as usize;
        let ln_n = (n as f64).ln();
        let (sin, cos) = (t * ln_n).sin_cos();
        let mut e = Complex64::new(cos, -sin);
        if len < BLOCK_MIN {
            for (a, &sigma) in acc.iter_mut().zip(sigmas) {
                *a += e * (-sigma * ln_n).exp();
            }
            n += 1;
            continue;
        }
        // log(n + m) - log n ≈ c1 m + c2 m² + c3 m³ + c4 m⁴ and its forward differences.
        let x = 1.0 / n as f64;
        let (c1, c2, c3, c4) = (x, -0.5 * x * x, x * x * x / 3.0, -0.25 * x * x * x * x);
        let d = [
            c1 + c2 + c3 + c4,
            2.0 * c2 + 6.0 * c3 + 14.0 * c4,
            6.0 * c3 + 36.0 * c4,
            24.0 * c4,
        ];
        let mut r1 = cis(-t * d[0]);
        let mut r2 = cis(-t * d[1]);
        let mut r3 = cis(-t * d[2]);
        let r4 = cis(-t * d[3]);
        let mut amp = sigmas.map(|sg| (-sg * ln_n).exp());
        let mut q1 = sigmas.map(|sg| exp_small(-sg * d[0]));
        let mut q2 = sigmas.map(|sg| exp_small(-sg * d[1]));
        let mut q3 = sigmas.map(|sg| exp_small(-sg * d[2]));
        let q4 = sigmas.map(|sg| exp_small(-sg * d[3]));
        let mut re = [0.0; LANES];
        let mut im = [0.0; LANES];
        for _ in 0..len {
            for j in 0..LANES {
                re[j] += e.re * amp[j];
                im[j] += e.im * amp[j];
                amp[j] *= q1[j];
                q1[j] *= q2[j];
                q2[j] *= q3[j];
                q3[j] *= q4[j];
            }
            e *= r1;
            r1 *= r2;
            r2 *= r3;
            r3 *= r4;
        }
        for j in 0..LANES {
            acc[j] += Complex64::new(re[j], im[j]);
        }
        n += len as u64;
    }
    acc
}

fn check_digits(digits: u32) -> Result<f64> {
    if !(1..=15).contains(&digits) {
        return Err(Error::invalid(format!(
            "target digits must lie in 1..=15, got {digits}"
        )));
    }
    Ok(10f64.powi(-(digits as i32)))
}

/// `ζ(s)` with absolute error below `10^{-digits}`.
pub fn zeta_eval(s: Complex64, digits: u32) -> Result<Complex64> {
    Ok(zeta_ladder(&[s.re], s.im, digits)?[0])
}

/// `ζ(σ_j + it)` for several abscissae at one height, sharing the head sum.
pub fn zeta_ladder(sigmas: &[f64], t: f64, digits: u32) -> Result<Vec<Complex64>> {
    let tol = check_digits(digits)?;
    if !t.is_finite() || t.abs() > MAX_HEIGHT {
        return Err(Error::Precision(format!(
            "height {t} is outside |t| <= {MAX_HEIGHT:e}"
        )));
    }
    if sigmas.iter().any(|s| !s.is_finite()) {
        return Err(Error::invalid("abscissa must be finite"));
    }
    if t == 0.0 && sigmas.contains(&1.0) {
        return Err(Error::Pole);
    }
    if t < 0.0 {
        return Ok(zeta_ladder(sigmas, -t, digits)?
            .into_iter()
            .map(|z| z.conj())
            .collect());
    }
    let mut n = 0;
    for &sg in sigmas {
        n = n.max(choose_n(Complex64::new(sg, t), tol)?);
    }
    for &sg in sigmas {
        let err = rounding_error(sg, t, n);
        if err > tol {
            return Err(Error::Precision(format!(
                "rounding error {err:e} at sigma = {sg}, t = {t} exceeds 1e-{digits}"
            )));
        }
    }
    // Term errors add up over at most ~100 effective terms of size one.
    let heads = head_sums(sigmas, t, n - 1, 1e-2 * tol);
    sigmas
        .iter()
        .zip(heads)
        .map(|(&sg, head)| {
            let s = Complex64::new(sg, t);
            let tail = em_tail(s, n, tol)
                .ok_or_else(|| Error::Precision(format!("corrections diverge at s = {s}")))?;
            Ok(head + tail)
        })
        .collect()
}

/// Settings for continuous-argument tracking.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TrackConfig {
    /// Largest abscissa step along the path.
    pub step: f64,
    pub digits: u32,
    /// Lowest abscissa accepted; must exceed 1/2.
    pub sigma_floor: f64,
    pub max_halvings: u32,
}

impl Default for TrackConfig {
    fn default() -> Self {
        Self {
            step: 0.25,
            digits: 6,
            sigma_floor: 0.5 + 1e-3,
            max_halvings: 10,
        }
    }
}

impl TrackConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) {
            return Err(Error::invalid(format!(
                "step must be positive, got {}",
                self.step
            )));
        }
        if !(self.sigma_floor > 0.5) {
            return Err(Error::invalid(format!(
                "sigma floor must exceed 1/2, got {}",
                self.sigma_floor
            )));
        }
        check_digits(self.digits).map(|_| ())
    }

    /// Abscissae from [`SIGMA_PIN`] down to `sigma` in equal steps.
    fn ladder(&self, sigma: f64) -> Vec<f64> {
        let span = SIGMA_PIN - sigma;
        let k = (span / self.step).ceil().max(1.0) as usize;
        (0..=k)
            .map(|i| {
                if i == k {
                    sigma
                } else {
                    SIGMA_PIN - span * i as f64 / k as f64
                }
            })
            .collect()
    }
}

/// `log|ζ| + i arg ζ` at `σ + it`, the argument continued along the horizontal
/// path from `3 + it` in steps of at most `step`.
pub fn log_zeta_tracked(sigma: f64, t: f64, step: f64) -> Result<Complex64> {
    log_zeta_tracked_with(
        sigma,
        t,
        &TrackConfig {
            step,
            ..TrackConfig::default()
        },
    )
}

pub fn log_zeta_tracked_with(sigma: f64, t: f64, cfg: &TrackConfig) -> Result<Complex64> {
    cfg.validate()?;
    if sigma < cfg.sigma_floor {
        return Err(Error::Convergence {
            sigma,
            floor: cfg.sigma_floor,
            what: "argument tracking".into(),
        });
    }
    if t < 0.0 {
        return Ok(log_zeta_tracked_with(sigma, -t, cfg)?.conj());
    }
    if sigma >= SIGMA_PIN {
        return Ok(zeta_eval(Complex64::new(sigma, t), cfg.digits)?.ln());
    }
    let ladder = cfg.ladder(sigma);
    let values = zeta_ladder(&ladder, t, cfg.digits)?;
    stitch(&ladder, &values, t, cfg)
}

fn stitch(ladder: &[f64], values: &[Complex64], t: f64, cfg: &TrackConfig) -> Result<Complex64> {
    let mut log = values[0].ln();
    for i in 1..ladder.len() {
        log = continue_log(
            log,
            (ladder[i - 1], values[i - 1]),
            (ladder[i], values[i]),
            t,
            cfg,
            0,
        )?;
    }
    Ok(log)
}

fn continue_log(
    log: Complex64,
    (sa, za): (f64, Complex64),
    (sb, zb): (f64, Complex64),
    t: f64,
    cfg: &TrackConfig,
    depth: u32,
) -> Result<Complex64> {
    if zb == ZERO || za == ZERO {
        return Err(Error::Continuation { sigma: sb, t });
    }
    let d = (zb / za).arg();
    if d.abs() < FRAC_PI_2 {
        return Ok(Complex64::new(zb.norm().ln(), log.im + d));
    }
    if depth >= cfg.max_halvings {
        return Err(Error::Continuation { sigma: sb, t });
    }
    let sm = 0.5 * (sa + sb);
    let zm = zeta_eval(Complex64::new(sm, t), cfg.digits)?;
    let mid = continue_log(log, (sa, za), (sm, zm), t, cfg, depth + 1)?;
    continue_log(mid, (sm, zm), (sb, zb), t, cfg, depth + 1)
}

/// One sampled height.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ZetaSample {
    pub t: f64,
    pub log_abs: f64,
    pub arg: f64,
    /// Continuation failed; the sample is excluded from all statistics.
    pub excluded: bool,
}

/// Settings of an empirical run over `t ∈ [T, 2T]`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ZetaRunConfig {
    pub t: f64,
    pub theta: f64,
    pub n_points: usize,
    pub seed: u64,
    pub track: TrackConfig,
    /// Abort when more than this fraction of samples is excluded.
    pub max_exclusion: f64,
}

impl ZetaRunConfig {
    pub fn new(t: f64, theta: f64, n_points: usize, seed: u64) -> Self {
        Self {
            t,
            theta,
            n_points,
            seed,
            track: TrackConfig::default(),
            max_exclusion: 0.01,
        }
    }
}

/// Samples `log ζ(σ_T + it)` at uniform random `t ∈ [T, 2T]`.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct ZetaSampleRun {
    pub config: ZetaRunConfig,
    pub log_t: f64,
    pub sigma: f64,
    pub psi: f64,
    pub samples: Vec<ZetaSample>,
    pub excluded: usize,
}

const RUN_CHUNK: usize = 16;

impl ZetaSampleRun {
    pub fn generate(config: ZetaRunConfig) -> Result<Self> {
        config.track.validate()?;
        if !(config.t >= 100.0 && 2.0 * config.t <= MAX_HEIGHT) {
            return Err(Error::invalid(format!(
                "T must lie in [100, {:e}], got {}",
                MAX_HEIGHT / 2.0,
                config.t
            )));
        }
        if config.n_points == 0 {
            return Err(Error::invalid("need at least one sample"));
        }
        let log_t = config.t.ln();
        let sigma = sigma_t(config.theta, log_t)?;
        let psi = psi_jt(&LFunctionSpec::zeta(), config.theta, log_t)?[0];
        if sigma < config.track.sigma_floor {
            return Err(Error::Convergence {
                sigma,
                floor: config.track.sigma_floor,
                what: "argument tracking".into(),
            });
        }
        let parts = map_chunks(config.n_points, RUN_CHUNK, |range| {
            range
                .map(|i| {
                    let u = CounterRng::new(config.seed, i as u64).next_f64();
                    let t = config.t * (1.0 + u);
                    match log_zeta_tracked_with(sigma, t, &config.track) {
                        Ok(z) => Ok(ZetaSample {
                            t,
                            log_abs: z.re,
                            arg: z.im,
                            excluded: false,
                        }),
                        Err(Error::Continuation { .. }) => Ok(ZetaSample {
                            t,
                            log_abs: f64::NAN,
                            arg: f64::NAN,
                            excluded: true,
                        }),
                        Err(e) => Err(e),
                    }
                })
                .collect::<Result<Vec<_>>>()
        });
        let mut samples = Vec::with_capacity(config.n_points);
        for part in parts {
            samples.extend(part?);
        }
        let excluded = samples.iter().filter(|s| s.excluded).count();
        Ok(Self {
            config,
            log_t,
            sigma,
            psi,
            samples,
            excluded,
        })
    }

    pub fn exclusion_rate(&self) -> f64 {
        self.excluded as f64 / self.samples.len() as f64
    }

    /// Fails when the exclusion rate exceeds the configured limit.
    pub fn check_exclusions(&self) -> Result<()> {
        let rate = self.exclusion_rate();
        if rate > self.config.max_exclusion {
            return Err(Error::ExclusionRate {
                rate,
                limit: self.config.max_exclusion,
            });
        }
        Ok(())
    }

    fn scale(&self) -> f64 {
        (PI * self.psi).sqrt().recip()
    }

    fn kept(&self) -> impl Iterator<Item = &ZetaSample> {
        self.samples.iter().filter(|s| !s.excluded)
    }

    /// `log|ζ| / √(πψ_T)` over the kept samples.
    pub fn normalized_re(&self) -> Vec<f64> {
        let k = self.scale();
        self.kept().map(|s| s.log_abs * k).collect()
    }

    /// `arg ζ / √(πψ_T)` over the kept samples.
    pub fn normalized_im(&self) -> Vec<f64> {
        let k = self.scale();
        self.kept().map(|s| s.arg * k).collect()
    }

    /// Indicator average over `rect` with its binomial standard error.
    pub fn probability(&self, rect: &Rectangle) -> Result<(f64, f64)> {
        if rect.j() != 1 {
            return Err(Error::ShapeMismatch("zeta runs are one-dimensional".into()));
        }
        let k = self.scale();
        let kept = self.samples.len() - self.excluded;
        if kept == 0 {
            return Err(Error::invalid("no samples kept"));
        }
        let hits = self
            .kept()
            .filter(|s| rect.contains(&[s.log_abs * k], &[s.arg * k]))
            .count();
        let n = kept as f64;
        let p = hits as f64 / n;
        Ok((p, (p * (1.0 - p) / n).sqrt()))
    }

    /// KS distance between the normalized `log|ζ|` and the leading Gaussian.
    pub fn ks_leading(&self) -> f64 {
        ks_statistic(&self.normalized_re(), gaussian_cdf)
    }

    /// CSV `t,log_abs,arg,flags`.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        writeln!(w, "t,log_abs,arg,flags")?;
        for s in &self.samples {
            let flag = if s.excluded { "excluded" } else { "ok" };
            writeln!(w, "{:.16e},{:.16e},{:.16e},{flag}", s.t, s.log_abs, s.arg)?;
        }
        Ok(())
    }
}

/// `Φ_T(rect)` estimated from `n_points` random heights in `[T, 2T]`:
/// `(estimate, stderr, excluded)`.
pub fn empirical_phi(
    t: f64,
    theta: f64,
    rect: &Rectangle,
    n_points: usize,
    seed: u64,
) -> Result<(f64, f64, usize)> {
    if n_points < 1000 {
        return Err(Error::invalid(format!(
            "need at least 1000 points, got {n_points}"
        )));
    }
    let run = ZetaSampleRun::generate(ZetaRunConfig::new(t, theta, n_points, seed))?;
    run.check_exclusions()?;
    let (p, se) = run.probability(rect)?;
    Ok((p, se, run.excluded))
}
