//! Goodness-of-fit statistics for comparing samples to predicted laws.

use crate::sum::NeumaierSum;

/// One-sample Kolmogorov–Smirnov statistic `sup |F_n − F|`.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut xs: Vec<f64> = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut k, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && k < b.len() {
        let x = a[i].min(b[k]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while k < b.len() && b[k] <= x {
            k += 1;
        }
        d = d.max((i as f64 / na - k as f64 / nb).abs());
    }
    d
}

/// Asymptotic Kolmogorov critical value `c(α)/√n_eff`.
pub fn ks_critical(alpha: f64, n_eff: f64) -> f64 {
    (-0.5 * (alpha / 2.0).ln()).sqrt() / n_eff.sqrt()
}

/// Sample skewness `m₃ / m₂^{3/2}` and its standard error `√(6/n)`.
pub fn skewness(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().copied().collect::<NeumaierSum>().value() / n;
    let m2 = xs
        .iter()
        .map(|x| (x - mean).powi(2))
        .collect::<NeumaierSum>()
        .value()
        / n;
    let m3 = xs
        .iter()
        .map(|x| (x - mean).powi(3))
        .collect::<NeumaierSum>()
        .value()
        / n;
    (m3 / m2.powf(1.5), (6.0 / n).sqrt())
}
