//! Scalar special functions: Gaussian window masses and the exponential
//! integral used for prime-sum tails.

const SQRT_PI: f64 = 1.772_453_850_905_516;
const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// `∫_a^b exp(-π u²) du`, with `±∞` endpoints allowed.
///
/// Uses `erfc` on whichever side keeps both endpoints in the same tail so that
/// small masses far from the origin keep their relative precision.
pub fn gaussian_mass(a: f64, b: f64) -> f64 {
    if a >= b {
        return 0.0;
    }
    let (sa, sb) = (SQRT_PI * a, SQRT_PI * b);
    if a >= 0.0 {
        0.5 * (erfc(sa) - erfc(sb))
    } else if b <= 0.0 {
        0.5 * (erfc(-sb) - erfc(-sa))
    } else {
        0.5 * (erf(sb) - erf(sa))
    }
}

/// Cumulative distribution of the density `exp(-π u²)`.
pub fn gaussian_cdf(x: f64) -> f64 {
    gaussian_mass(f64::NEG_INFINITY, x)
}

pub fn erf(x: f64) -> f64 {
    if x.is_infinite() {
        return x.signum();
    }
    libm::erf(x)
}

pub fn erfc(x: f64) -> f64 {
    if x == f64::INFINITY {
        return 0.0;
    }
    if x == f64::NEG_INFINITY {
        return 2.0;
    }
    libm::erfc(x)
}

/// Exponential integral `E1(x) = ∫_x^∞ e^{-t}/t dt` for `x > 0`.
pub fn exp_integral_e1(x: f64) -> f64 {
    assert!(x > 0.0, "E1 needs a positive argument, got {x}");
    if x <= 1.0 {
        // Power series.
        let mut term = 1.0;
        let mut acc = 0.0;
        for k in 1..200 {
            term *= -x / k as f64;
            let add = -term / k as f64;
            acc += add;
            if add.abs() < 1e-17 * acc.abs() {
                break;
            }
        }
        -EULER_GAMMA - x.ln() + acc
    } else {
        // Continued fraction, modified Lentz.
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..500 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h * (-x).exp()
    }
}

/// Prime-number-theorem estimate of `Σ_{p > cutoff} p^{-s}` for `s > 1`:
/// `∫_cutoff^∞ x^{-s} / ln x dx = E1((s - 1) ln cutoff)`.
pub fn prime_power_tail_estimate(s: f64, cutoff: f64) -> f64 {
    assert!(s > 1.0 && cutoff > 1.0);
    exp_integral_e1((s - 1.0) * cutoff.ln())
}

/// Rigorous upper bound for `Σ_{n > cutoff} n^{-s}` over all integers,
/// `s > 1`; every prime sum is dominated by it.
pub fn integer_power_tail_bound(s: f64, cutoff: f64) -> f64 {
    assert!(s > 1.0);
    cutoff.powf(1.0 - s) / (s - 1.0)
}

/// `1/sqrt(π)`.
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

pub(crate) fn sqrt_pi() -> f64 {
    SQRT_PI
}
