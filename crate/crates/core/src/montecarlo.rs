//! Monte Carlo sampling of the random Euler product.
//!
//! Each sample draws independent `X(p)` uniform on the unit circle for every
//! `p ≤ P_MC` and accumulates `log L_j(σ, X) = Σ_p g_{j,p}(σ)`. The real part
//! is `log|L_j|`, the imaginary part the continuous `arg L_j`. Draw `i` of
//! sample `s` comes from the counter-based stream `(seed, s, i)`, so batches
//! are reproducible whatever the worker count.

use crate::distribution::Rectangle;
use crate::error::{Error, Result};
use crate::lfunction::{beta_from_roots, LFunctionSpec, MAX_J};
use crate::local::{g_poly, DEFAULT_TOL};
use crate::parallel::map_chunks;
use crate::primes::primes_up_to;
use crate::rng::CounterRng;
use crate::special::prime_power_tail_estimate;
use crate::sum::{ComplexSum, NeumaierSum};
use num_complex::Complex64;
use std::io::{Read, Write};
use std::path::Path;

const SAMPLE_CHUNK: usize = 512;
/// Samples evaluated side by side in the inner loop.
const LANES: usize = 4;
const MAGIC: &[u8; 8] = b"RNDEULB1";

/// `n` draws of `(log|L_j|, arg L_j)`, stored row-major as
/// `[log|L_1|, arg L_1, …, log|L_J|, arg L_J]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub spec: String,
    pub j: usize,
    pub sigma: f64,
    pub p_mc: u64,
    pub n: usize,
    pub seed: u64,
    /// Estimated standard deviation of `Σ_{p > P_MC} g_{j,p}` per `j`.
    pub truncation_sd: Vec<f64>,
    pub samples: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, i: usize) -> &[f64] {
        &self.samples[2 * self.j * i..2 * self.j * (i + 1)]
    }

    /// Column `2j` (`log|L_j|`) or `2j + 1` (`arg L_j`).
    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.samples[2 * self.j * i + c])
            .collect()
    }

    /// Writes the binary layout: magic, label, σ, P_MC, n, seed, J, the
    /// per-`j` truncation sd, then `n × 2J` little-endian `f64`.
    pub fn write_binary(&self, w: &mut impl Write) -> Result<()> {
        w.write_all(MAGIC)?;
        w.write_all(&(self.spec.len() as u32).to_le_bytes())?;
        w.write_all(self.spec.as_bytes())?;
        w.write_all(&self.sigma.to_le_bytes())?;
        w.write_all(&self.p_mc.to_le_bytes())?;
        w.write_all(&(self.n as u64).to_le_bytes())?;
        w.write_all(&self.seed.to_le_bytes())?;
        w.write_all(&(self.j as u32).to_le_bytes())?;
        for s in &self.truncation_sd {
            w.write_all(&s.to_le_bytes())?;
        }
        for x in &self.samples {
            w.write_all(&x.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn read_binary(r: &mut impl Read) -> Result<Self> {
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(Error::Parse {
                line: 0,
                message: "not a sample batch file".into(),
            });
        }
        let mut b4 = [0u8; 4];
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b4)?;
        let mut label = vec![0u8; u32::from_le_bytes(b4) as usize];
        r.read_exact(&mut label)?;
        let spec = String::from_utf8(label).map_err(|_| Error::Parse {
            line: 0,
            message: "label is not UTF-8".into(),
        })?;
        let mut f = |r: &mut dyn Read| -> Result<[u8; 8]> {
            r.read_exact(&mut b8)?;
            Ok(b8)
        };
        let sigma = f64::from_le_bytes(f(r)?);
        let p_mc = u64::from_le_bytes(f(r)?);
        let n = u64::from_le_bytes(f(r)?) as usize;
        let seed = u64::from_le_bytes(f(r)?);
        r.read_exact(&mut b4)?;
        let j = u32::from_le_bytes(b4) as usize;
        if j == 0 || j > crate::lfunction::MAX_J {
            return Err(Error::Parse {
                line: 0,
                message: format!("bad J = {j}"),
            });
        }
        let truncation_sd = (0..j)
            .map(|_| Ok(f64::from_le_bytes(f(r)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut samples = Vec::with_capacity(n * 2 * j);
        for _ in 0..n * 2 * j {
            samples.push(f64::from_le_bytes(f(r)?));
        }
        Ok(Self {
            spec,
            j,
            sigma,
            p_mc,
            n,
            seed,
            truncation_sd,
            samples,
        })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        self.write_binary(&mut f)?;
        f.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::read_binary(&mut std::io::BufReader::new(std::fs::File::open(path)?))
    }

    /// CSV with a header `log_abs_1,arg_1,…`, one row per sample.
    pub fn write_csv(&self, w: &mut impl Write) -> Result<()> {
        let header: Vec<String> = (1..=self.j)
            .flat_map(|j| [format!("log_abs_{j}"), format!("arg_{j}")])
            .collect();
        writeln!(w, "{}", header.join(","))?;
        for i in 0..self.n {
            let row: Vec<String> = self.row(i).iter().map(|x| format!("{x:.16e}")).collect();
            writeln!(w, "{}", row.join(","))?;
        }
        Ok(())
    }
}

/// Flattened `g_{j,p}` coefficients for all primes up to `P_MC`.
struct SamplerPlan {
    j: usize,
    offsets: Vec<usize>,
    coeffs: Vec<Complex64>,
}

impl SamplerPlan {
    fn new(spec: &LFunctionSpec, sigma: f64, p_mc: u64, tol: f64) -> Result<Self> {
        let primes = primes_up_to(p_mc);
        let j = spec.j();
        let mut offsets = Vec::with_capacity(primes.len() + 1);
        let mut coeffs = Vec::new();
        offsets.push(0);
        for &p in &primes {
            let polys = (0..j)
                .map(|jj| g_poly(spec, jj, p, sigma, tol))
                .collect::<Result<Vec<_>>>()?;
            let m = polys[0].m;
            // Layout per prime: for each power m (highest first), J coefficients.
            for k in (0..m).rev() {
                for poly in &polys {
                    coeffs.push(poly.coeffs[k]);
                }
            }
            offsets.push(coeffs.len());
        }
        Ok(Self { j, offsets, coeffs })
    }

    fn primes(&self) -> usize {
        self.offsets.len() - 1
    }

    fn sample(
        &self,
        seed: u64,
        index: u64,
        out: &mut [f64],
        acc: &mut [ComplexSum],
        g: &mut [Complex64],
    ) {
        let mut rng = CounterRng::new(seed, index);
        acc.iter_mut().for_each(|a| *a = ComplexSum::new());
        let j = self.j;
        for i in 0..self.primes() {
            let x = rng.unit_circle();
            let block = &self.coeffs[self.offsets[i]..self.offsets[i + 1]];
            g.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
            for row in block.chunks_exact(j) {
                for (gv, c) in g.iter_mut().zip(row) {
                    *gv = (*gv + c) * x;
                }
            }
            for (a, gv) in acc.iter_mut().zip(g.iter()) {
                a.add(*gv);
            }
        }
        for (jj, a) in acc.iter().enumerate() {
            let v = a.value();
            out[2 * jj] = v.re;
            out[2 * jj + 1] = v.im;
        }
    }

    /// [`SamplerPlan::sample`] for `LANES` consecutive samples at once. The
    /// lanes are independent dependency chains, so their latencies overlap;
    /// each lane performs exactly the scalar path's operations in order.
    fn sample_lanes(&self, seed: u64, first: u64, out: &mut [f64]) {
        let j = self.j;
        let mut rng: [CounterRng; LANES] =
            std::array::from_fn(|l| CounterRng::new(seed, first + l as u64));
        let mut acc = [[ComplexSum::new(); LANES]; MAX_J];
        let zero = Complex64::new(0.0, 0.0);
        for i in 0..self.primes() {
            let x: [Complex64; LANES] = std::array::from_fn(|l| rng[l].unit_circle());
            let block = &self.coeffs[self.offsets[i]..self.offsets[i + 1]];
            let mut g = [[zero; LANES]; MAX_J];
            for row in block.chunks_exact(j) {
                for (gj, c) in g.iter_mut().zip(row) {
                    for l in 0..LANES {
                        gj[l] = (gj[l] + c) * x[l];
                    }
                }
            }
            for (aj, gj) in acc.iter_mut().zip(&g).take(j) {
                for l in 0..LANES {
                    aj[l].add(gj[l]);
                }
            }
        }
        let width = 2 * j;
        for (jj, aj) in acc.iter().enumerate().take(j) {
            for (l, a) in aj.iter().enumerate() {
                let v = a.value();
                out[l * width + 2 * jj] = v.re;
                out[l * width + 2 * jj + 1] = v.im;
            }
        }
    }
}

/// Draws `n` samples of `log L_j(σ, X)` truncated at `P_MC`.
pub fn sample_log_l(
    spec: &LFunctionSpec,
    sigma: f64,
    p_mc: u64,
    n: usize,
    seed: u64,
) -> Result<SampleBatch> {
    sample_log_l_with_tol(spec, sigma, p_mc, n, seed, DEFAULT_TOL)
}

pub fn sample_log_l_with_tol(
    spec: &LFunctionSpec,
    sigma: f64,
    p_mc: u64,
    n: usize,
    seed: u64,
    tol: f64,
) -> Result<SampleBatch> {
    if !(sigma > 0.5) {
        return Err(Error::Convergence {
            sigma,
            floor: 0.5,
            what: "the random Euler product".into(),
        });
    }
    if p_mc < 1000 {
        return Err(Error::invalid(format!(
            "P_MC must be at least 1000, got {p_mc}"
        )));
    }
    if n == 0 {
        return Err(Error::invalid("need at least one sample"));
    }
    let plan = SamplerPlan::new(spec, sigma, p_mc, tol)?;
    let width = 2 * spec.j();
    let parts = map_chunks(n, SAMPLE_CHUNK, |range| {
        let mut out = vec![0.0; range.len() * width];
        let mut acc = vec![ComplexSum::new(); spec.j()];
        let mut g = vec![Complex64::new(0.0, 0.0); spec.j()];
        let start = range.start;
        let full = range.len() / LANES * LANES;
        for (k, rows) in out[..full * width]
            .chunks_exact_mut(LANES * width)
            .enumerate()
        {
            plan.sample_lanes(seed, (start + k * LANES) as u64, rows);
        }
        for (row, s) in out[full * width..]
            .chunks_exact_mut(width)
            .zip(start + full..range.end)
        {
            plan.sample(seed, s as u64, row, &mut acc, &mut g);
        }
        out
    });
    Ok(SampleBatch {
        spec: spec.label(),
        j: spec.j(),
        sigma,
        p_mc,
        n,
        seed,
        truncation_sd: tail_sd(spec, sigma, p_mc)?,
        samples: parts.concat(),
    })
}

/// Fraction of samples whose normalized vector
/// `(log|L_j| / √(πψ_j), arg L_j / √(πψ_j))` lies in `rect`, with its
/// binomial standard error.
pub fn empirical_probability(
    batch: &SampleBatch,
    rect: &Rectangle,
    psi: &[f64],
) -> Result<(f64, f64)> {
    if batch.n == 0 {
        return Err(Error::invalid("empty batch"));
    }
    if rect.j() != batch.j || psi.len() != batch.j {
        return Err(Error::ShapeMismatch(
            "rectangle, psi and batch disagree on J".into(),
        ));
    }
    let scale: Vec<f64> = psi
        .iter()
        .map(|p| (std::f64::consts::PI * p).sqrt().recip())
        .collect();
    let (mut re, mut im) = (vec![0.0; batch.j], vec![0.0; batch.j]);
    let mut hits = 0usize;
    for i in 0..batch.n {
        let row = batch.row(i);
        for j in 0..batch.j {
            re[j] = row[2 * j] * scale[j];
            im[j] = row[2 * j + 1] * scale[j];
        }
        if rect.contains(&re, &im) {
            hits += 1;
        }
    }
    let n = batch.n as f64;
    let p = hits as f64 / n;
    Ok((p, (p * (1.0 - p) / n).sqrt()))
}

/// Standard deviation of the discarded `Σ_{p > P_MC} g_{j,p}(σ)`:
/// `√(Σ_{p > P} Σ_m |β_j(p^m)|² p^{-2mσ})`, with the `m = 1` part estimated
/// as `ĉ_j E₁((2σ−1) log P)` (`ĉ_j` the mean of `|β_j(p)|²` over
/// `(P/2, P]`) and the `m ≥ 2` part bounded by the integral test.
pub fn tail_sd(spec: &LFunctionSpec, sigma: f64, p_mc: u64) -> Result<Vec<f64>> {
    if !(sigma > 0.5) {
        return Err(Error::Convergence {
            sigma,
            floor: 0.5,
            what: "the tail variance".into(),
        });
    }
    let block: Vec<u64> = primes_up_to(p_mc)
        .into_iter()
        .filter(|&p| p > p_mc / 2)
        .collect();
    let pf = p_mc as f64;
    let first = prime_power_tail_estimate(2.0 * sigma, pf);
    let d = spec.degree() as f64;
    let s = sigma - spec.eta();
    let mut higher = 0.0;
    for m in 2..200 {
        let e = 2.0 * m as f64 * s;
        if e <= 1.0 {
            continue;
        }
        let t = (d / m as f64).powi(2) * pf.powf(1.0 - e) / (e - 1.0);
        higher += t;
        if t < 1e-20 {
            break;
        }
    }
    (0..spec.j())
        .map(|j| {
            let member = spec.member(j)?;
            let mean = if block.is_empty() {
                (d).powi(2)
            } else {
                block
                    .iter()
                    .map(|&p| beta_from_roots(&member.roots(p), 1).norm_sqr())
                    .sum::<f64>()
                    / block.len() as f64
            };
            Ok((mean * first + higher).sqrt())
        })
        .collect()
}

/// Fails with [`Error::Gate`] unless every `tail_sd_j ≤ fraction · √(min ψ)`.
pub fn check_gate(tail: &[f64], psi: &[f64], fraction: f64) -> Result<()> {
    let psi_min = psi.iter().copied().fold(f64::INFINITY, f64::min);
    let limit = fraction * psi_min.sqrt();
    let worst = tail.iter().copied().fold(0.0, f64::max);
    if worst > limit {
        return Err(Error::Gate {
            tail_sd: worst,
            limit,
        });
    }
    Ok(())
}

/// Mean and standard error of a column.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().copied().collect::<NeumaierSum>().value() / n;
    let var = xs
        .iter()
        .map(|x| (x - mean).powi(2))
        .collect::<NeumaierSum>()
        .value()
        / (n - 1.0);
    (mean, (var / n).sqrt())
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().copied().collect::<NeumaierSum>().value() / n;
    xs.iter()
        .map(|x| (x - mean).powi(2))
        .collect::<NeumaierSum>()
        .value()
        / (n - 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_and_persistent() {
        let spec = LFunctionSpec::chi3_chi4();
        let a = sample_log_l(&spec, 0.7, 1000, 300, 9).unwrap();
        let b = sample_log_l(&spec, 0.7, 1000, 300, 9).unwrap();
        assert_eq!(a, b);
        let c = sample_log_l(&spec, 0.7, 1000, 300, 10).unwrap();
        assert_ne!(a.samples, c.samples);
        let mut buf = Vec::new();
        a.write_binary(&mut buf).unwrap();
        let back = SampleBatch::read_binary(&mut buf.as_slice()).unwrap();
        assert_eq!(back, a);
        let mut csv = Vec::new();
        a.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("log_abs_1,arg_1,log_abs_2,arg_2\n"));
        assert_eq!(text.lines().count(), 301);
    }

    #[test]
    fn prefix_of_longer_batch() {
        let spec = LFunctionSpec::zeta();
        let a = sample_log_l(&spec, 0.8, 1000, 100, 3).unwrap();
        let b = sample_log_l(&spec, 0.8, 1000, 700, 3).unwrap();
        assert_eq!(a.samples[..], b.samples[..a.samples.len()]);
    }

    #[test]
    fn counting_rules() {
        let spec = LFunctionSpec::zeta();
        let batch = sample_log_l(&spec, 0.8, 1000, 500, 1).unwrap();
        let psi = [1.0];
        assert_eq!(
            empirical_probability(&batch, &Rectangle::full(1), &psi)
                .unwrap()
                .0,
            1.0
        );
        let empty = Rectangle::uniform(1, 0.2, 0.2, -1.0, 1.0).unwrap();
        assert_eq!(
            empirical_probability(&batch, &empty, &psi).unwrap(),
            (0.0, 0.0)
        );
    }

    #[test]
    fn gate_and_tail() {
        let spec = LFunctionSpec::zeta();
        let t4 = tail_sd(&spec, 0.6, 10_000).unwrap()[0];
        let t5 = tail_sd(&spec, 0.6, 100_000).unwrap()[0];
        assert!(t5 < t4);
        assert!(check_gate(&[0.01], &[1.0], 0.02).is_ok());
        assert!(matches!(
            check_gate(&[0.5], &[1.0], 0.02),
            Err(Error::Gate { .. })
        ));
        assert!(sample_log_l(&spec, 0.5, 1000, 10, 1).is_err());
    }

    #[test]
    fn lanes_match_scalar_path() {
        let spec = LFunctionSpec::chi3_chi4();
        let batch = sample_log_l(&spec, 0.6, 2000, 9, 4).unwrap();
        let plan = SamplerPlan::new(&spec, 0.6, 2000, DEFAULT_TOL).unwrap();
        let mut acc = vec![ComplexSum::new(); 2];
        let mut g = vec![Complex64::new(0.0, 0.0); 2];
        let mut row = vec![0.0; 4];
        for i in 0..9 {
            plan.sample(4, i as u64, &mut row, &mut acc, &mut g);
            assert_eq!(batch.row(i), &row[..]);
        }
    }
}
