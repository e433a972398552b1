//! Hermite polynomials and the Gaussian–Hermite integrals behind the density
//! and probability formulas.
//!
//! **Convention.** Everything here uses the *physicists'* polynomials
//! `H_n(x) = (-1)^n e^{x²} dⁿ/dxⁿ e^{-x²}`, so `H_1(x) = 2x` and
//! `H_2(x) = 4x² - 2`. The probabilists' `He_n` differ by rescaling and must
//! not be substituted.

use crate::error::{Error, Result};
use crate::special::{gaussian_mass, FRAC_1_SQRT_PI};
use num_bigint::BigInt;
use std::f64::consts::PI;

/// Highest degree accepted by the floating-point evaluators.
pub const MAX_DEGREE: usize = 64;

/// Exact integer coefficients of `H_n`, lowest power first.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HermiteEval {
    pub n: usize,
    pub coefficients: Vec<BigInt>,
}

impl HermiteEval {
    /// Builds `H_n` from `H_{n+1} = 2x H_n - 2n H_{n-1}` in exact arithmetic.
    pub fn new(n: usize) -> Self {
        let mut prev: Vec<BigInt> = vec![BigInt::from(1)];
        if n == 0 {
            return Self {
                n,
                coefficients: prev,
            };
        }
        let mut cur: Vec<BigInt> = vec![BigInt::from(0), BigInt::from(2)];
        for m in 1..n {
            let mut next = vec![BigInt::from(0); m + 2];
            for (i, c) in cur.iter().enumerate() {
                next[i + 1] += c * 2;
            }
            for (i, c) in prev.iter().enumerate() {
                next[i] -= c * (2 * m as i64);
            }
            prev = cur;
            cur = next;
        }
        Self {
            n,
            coefficients: cur,
        }
    }

    /// Horner evaluation of the exact coefficients (each rounded to `f64`).
    pub fn eval_coefficients(&self, x: f64) -> f64 {
        self.coefficients
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + bigint_to_f64(c))
    }
}

fn bigint_to_f64(c: &BigInt) -> f64 {
    c.to_string().parse::<f64>().expect("integer literal")
}

/// `H_n(x)` by the three-term recurrence.
pub fn hermite_eval(n: usize, x: f64) -> Result<f64> {
    if n > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange {
            degree: n,
            cutoff: MAX_DEGREE,
        });
    }
    Ok(hermite_unchecked(n, x))
}

#[inline]
pub(crate) fn hermite_unchecked(n: usize, x: f64) -> f64 {
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 2.0 * x;
    for m in 1..n {
        let next = 2.0 * x * cur - 2.0 * m as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_0(x), …, H_n(x)` in one pass.
pub fn hermite_all(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(1.0);
    if n == 0 {
        return out;
    }
    out.push(2.0 * x);
    for m in 1..n {
        out.push(2.0 * x * out[m] - 2.0 * m as f64 * out[m - 1]);
    }
    out
}

/// `e^{-x²} H_n(x)`, returning exactly zero once the Gaussian underflows
/// (this is also the value at `x = ±∞`).
fn weighted(n: usize, x: f64) -> f64 {
    let w = (-x * x).exp();
    if w == 0.0 || !x.is_finite() {
        return 0.0;
    }
    w * hermite_unchecked(n, x)
}

/// `∫_a^b e^{-π u²} H_k(√π u) du`; endpoints may be infinite.
///
/// For `k ≥ 1` this is the telescoping closed form
/// `-(1/√π) [e^{-π u²} H_{k-1}(√π u)]_a^b`; for `k = 0` it is the Gaussian
/// window mass.
pub fn gauss_hermite_segment(k: usize, a: f64, b: f64) -> f64 {
    if k == 0 {
        return gaussian_mass(a, b);
    }
    let s = crate::special::sqrt_pi();
    -FRAC_1_SQRT_PI * (weighted(k - 1, s * b) - weighted(k - 1, s * a))
}

/// Segment integrals for all degrees `0..=n` over one window.
pub fn gauss_hermite_segments(n: usize, a: f64, b: f64) -> Vec<f64> {
    (0..=n).map(|k| gauss_hermite_segment(k, a, b)).collect()
}

/// `π^{-1/2} ψ^{-(k+1)/2} e^{-u²/ψ} H_k(u/√ψ)`: the Gaussian Fourier integral
/// `∫ e^{-ψπ²x² - 2πixu} x^k dx` with its `(2πi)^{-k}` phase removed.
pub fn gaussian_fourier_hermite(psi: f64, k: usize, u: f64) -> Result<f64> {
    if !(psi > 0.0) {
        return Err(Error::invalid(format!("psi must be positive, got {psi}")));
    }
    if k > MAX_DEGREE {
        return Err(Error::DegreeOutOfRange {
            degree: k,
            cutoff: MAX_DEGREE,
        });
    }
    Ok(fourier_hermite_unchecked(psi, k, u))
}

#[inline]
pub(crate) fn fourier_hermite_unchecked(psi: f64, k: usize, u: f64) -> f64 {
    let r = psi.sqrt();
    let w = u / r;
    FRAC_1_SQRT_PI * r.powi(-(k as i32 + 1)) * weighted(k, w)
}

/// `(πψ)^{-1/2} e^{-u²/ψ}`, the `k = 0` case written out.
pub fn gaussian_kernel(psi: f64, u: f64) -> f64 {
    (PI * psi).sqrt().recip() * (-u * u / psi).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn low_degrees() {
        assert_eq!(hermite_eval(0, 3.7).unwrap(), 1.0);
        assert_eq!(hermite_eval(1, 0.5).unwrap(), 1.0);
        assert_eq!(hermite_eval(2, 1.0).unwrap(), 2.0);
        assert_eq!(hermite_eval(3, 1.0).unwrap(), -4.0);
        assert!(hermite_eval(65, 0.0).is_err());
    }

    #[test]
    fn exact_coefficients() {
        let h4 = HermiteEval::new(4);
        let c: Vec<i64> = h4
            .coefficients
            .iter()
            .map(|c| c.to_string().parse().unwrap())
            .collect();
        assert_eq!(c, vec![12, 0, -48, 0, 16]);
        // H_n(0) = (-1)^{n/2} n!/(n/2)! for even n
        let h30 = HermiteEval::new(30);
        let expect: BigInt = (16..=30u32).fold(BigInt::from(1), |a, k| a * k) * -1;
        assert_eq!(h30.coefficients[0], expect);
    }

    #[test]
    fn recurrence_exact_in_integers() {
        for n in 1..40 {
            let (hm, h, hp) = (
                HermiteEval::new(n - 1),
                HermiteEval::new(n),
                HermiteEval::new(n + 1),
            );
            let mut rhs = vec![BigInt::from(0); n + 2];
            for (i, c) in h.coefficients.iter().enumerate() {
                rhs[i + 1] += c * 2;
            }
            for (i, c) in hm.coefficients.iter().enumerate() {
                rhs[i] -= c * (2 * n as i64);
            }
            assert_eq!(hp.coefficients, rhs);
        }
    }

    #[test]
    fn recurrence_matches_coefficients() {
        for n in 0..=20 {
            let h = HermiteEval::new(n);
            for &x in &[-1.3, -0.2, 0.0, 0.7, 2.1] {
                let a = hermite_eval(n, x).unwrap();
                let b = h.eval_coefficients(x);
                assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn segment_closed_forms() {
        assert_eq!(
            gauss_hermite_segment(0, f64::NEG_INFINITY, f64::INFINITY),
            1.0
        );
        assert_relative_eq!(
            gauss_hermite_segment(1, 0.0, f64::INFINITY),
            FRAC_1_SQRT_PI,
            max_relative = 1e-15
        );
        for k in 1..=30 {
            assert_eq!(
                gauss_hermite_segment(k, f64::NEG_INFINITY, f64::INFINITY),
                0.0
            );
        }
        assert_eq!(gauss_hermite_segment(3, 0.4, 0.4), 0.0);
    }

    #[test]
    fn segment_telescopes() {
        for k in 1..10 {
            let whole = gauss_hermite_segment(k, -0.7, 1.1);
            let split = gauss_hermite_segment(k, -0.7, 0.2) + gauss_hermite_segment(k, 0.2, 1.1);
            assert!((whole - split).abs() < 1e-13);
        }
    }

    #[test]
    fn fourier_hermite_cases() {
        let psi = 2.5;
        for &u in &[-1.0, 0.0, 0.3] {
            assert_relative_eq!(
                gaussian_fourier_hermite(psi, 0, u).unwrap(),
                gaussian_kernel(psi, u),
                max_relative = 1e-14
            );
        }
        assert_eq!(gaussian_fourier_hermite(1.7, 1, 0.0).unwrap(), 0.0);
        assert_relative_eq!(
            gaussian_fourier_hermite(1.0, 2, 0.0).unwrap(),
            -2.0 * FRAC_1_SQRT_PI,
            max_relative = 1e-15
        );
        assert!(gaussian_fourier_hermite(0.0, 1, 0.0).is_err());
    }

    #[test]
    fn large_arguments_do_not_produce_nan() {
        let v = gauss_hermite_segment(60, -1e6, 1e6);
        assert!(v.is_finite());
        assert!(fourier_hermite_unchecked(0.5, 64, 1e5).is_finite());
    }
}
