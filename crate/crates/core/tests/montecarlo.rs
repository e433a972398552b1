mod common;

use randeuler::lfunction::psi_exact;
use randeuler::montecarlo::{
    check_gate, empirical_probability, mean_stderr, sample_log_l, tail_sd, variance, SampleBatch,
};
use randeuler::stats::skewness;
use randeuler::{Error, LFunctionSpec, Rectangle};
use std::sync::OnceLock;

const SIGMA: f64 = 0.5251;
const P_MC: u64 = 100_000;

fn batch() -> &'static SampleBatch {
    static B: OnceLock<SampleBatch> = OnceLock::new();
    B.get_or_init(|| sample_log_l(&LFunctionSpec::zeta(), SIGMA, P_MC, 100_000, 7).unwrap())
}

#[test]
fn variance_is_half_the_prime_sum() {
    let half = psi_exact(&LFunctionSpec::zeta(), SIGMA, P_MC, 60).unwrap()[0].value / 2.0;
    let b = batch();
    for c in 0..2 {
        let v = variance(&b.column(c));
        assert!((v / half - 1.0).abs() < 0.05, "column {c}: {v} vs {half}");
    }
}

#[test]
fn means_vanish() {
    let b = batch();
    for c in 0..2 {
        let (m, se) = mean_stderr(&b.column(c));
        assert!(m.abs() < 4.0 * se, "column {c}: {m} ± {se}");
    }
}

#[test]
fn argument_is_symmetric() {
    // X ↦ X̄ maps arg L to −arg L, so its skewness vanishes; log|L| is right-skewed.
    let (s_arg, se) = skewness(&batch().column(1));
    assert!(s_arg.abs() < 4.0 * se, "{s_arg} ± {se}");
    let (s_abs, _) = skewness(&batch().column(0));
    assert!(s_abs > 4.0 * se);
}

#[test]
fn complementary_boxes_sum_to_one() {
    let b = batch();
    let psi = [psi_exact(&LFunctionSpec::zeta(), SIGMA, P_MC, 60).unwrap()[0].value];
    for w in [-0.7, 0.0, 0.35] {
        let left = Rectangle::new(
            vec![f64::NEG_INFINITY],
            vec![w],
            vec![f64::NEG_INFINITY],
            vec![f64::INFINITY],
        )
        .unwrap();
        let right = Rectangle::new(
            vec![w],
            vec![f64::INFINITY],
            vec![f64::NEG_INFINITY],
            vec![f64::INFINITY],
        )
        .unwrap();
        let (l, _) = empirical_probability(b, &left, &psi).unwrap();
        let (r, _) = empirical_probability(b, &right, &psi).unwrap();
        assert_eq!(l + r, 1.0);
    }
    let (p, se) = empirical_probability(b, &Rectangle::centered(1, 0.5), &psi).unwrap();
    assert!(p > 0.0 && p < 1.0);
    assert!((se - (p * (1.0 - p) / 1e5).sqrt()).abs() < 1e-15);
    assert!(empirical_probability(b, &Rectangle::full(2), &psi).is_err());
}

#[test]
fn tail_estimate_against_direct_prime_sum() {
    // Σ_{P < p ≤ 10^8} Σ_m p^{-2mσ}/m² against the difference of the two estimates.
    let primes = common::naive_sieve(100_000_000);
    let direct = common::kahan(primes.iter().filter(|&&p| p > P_MC).map(|&p| {
        let w = (p as f64).powf(-2.0 * SIGMA);
        w + w * w / 4.0
    }));
    let spec = LFunctionSpec::zeta();
    let near = tail_sd(&spec, SIGMA, P_MC).unwrap()[0];
    let far = tail_sd(&spec, SIGMA, 100_000_000).unwrap()[0];
    let estimate = near * near - far * far;
    assert!(
        (estimate / direct - 1.0).abs() < 0.1,
        "{estimate} vs {direct}"
    );
}

#[test]
fn deterministic_per_seed() {
    let spec = LFunctionSpec::chi3_chi4();
    let a = sample_log_l(&spec, 0.6, 5000, 1030, 11).unwrap();
    let b = sample_log_l(&spec, 0.6, 5000, 1030, 11).unwrap();
    let c = sample_log_l(&spec, 0.6, 5000, 1030, 12).unwrap();
    assert_eq!(a.samples, b.samples);
    assert_ne!(a.samples, c.samples);
    let prefix = sample_log_l(&spec, 0.6, 5000, 517, 11).unwrap();
    assert_eq!(prefix.samples[..], a.samples[..prefix.samples.len()]);
    let path = std::env::temp_dir().join(format!("randeuler-mc-{}.bin", std::process::id()));
    a.save(&path).unwrap();
    let back = SampleBatch::load(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(back, a);
    let mut csv = Vec::new();
    a.write_csv(&mut csv).unwrap();
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(
        text.lines().next().unwrap(),
        "log_abs_1,arg_1,log_abs_2,arg_2"
    );
    assert_eq!(text.lines().count(), 1031);
}

#[test]
fn gate_rejects_short_products() {
    let spec = LFunctionSpec::zeta();
    let tail = tail_sd(&spec, SIGMA, P_MC).unwrap();
    let psi = [0.4 * 1e4f64.ln()];
    assert!(matches!(
        check_gate(&tail, &psi, 0.02),
        Err(Error::Gate { .. })
    ));
    let far = tail_sd(&spec, 1.5, P_MC).unwrap();
    assert!(check_gate(&far, &psi, 0.02).is_ok());
    assert!(sample_log_l(&spec, 0.6, 999, 10, 0).is_err());
    assert!(sample_log_l(&spec, 0.6, 1000, 0, 0).is_err());
}
