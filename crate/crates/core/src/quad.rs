//! Adaptive Gauss–Kronrod (7/15) quadrature.
//!
//! General-purpose integration used for cross-checks of the closed forms and
//! by the `selftest` front end. Only finite intervals are supported.

use crate::sum::NeumaierSum;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        kron += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Integrates `f` over `[a, b]` until the estimated error is below
/// `max(abs_tol, rel_tol * |I|)` or `max_intervals` is reached.
pub fn integrate<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_intervals: usize,
) -> QuadResult {
    if a == b {
        return QuadResult {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        };
    }
    assert!(a.is_finite() && b.is_finite(), "finite limits required");
    let (v, e) = gk15(&mut f, a, b);
    // (error, a, b, value)
    let mut parts: Vec<(f64, f64, f64, f64)> = vec![(e, a, b, v)];
    let mut evals = 15;
    loop {
        let total: NeumaierSum = parts.iter().map(|p| p.3).collect();
        let err: f64 = parts.iter().map(|p| p.0).sum();
        if err <= abs_tol.max(rel_tol * total.value().abs()) || parts.len() >= max_intervals {
            return QuadResult {
                value: total.value(),
                error: err,
                evaluations: evals,
            };
        }
        let (idx, _) = parts
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .0.total_cmp(&y.1 .0))
            .unwrap();
        let (_, lo, hi, _) = parts.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evals += 30;
        parts.push((e1, lo, mid, v1));
        parts.push((e2, mid, hi, v2));
    }
}

/// Iterated two-dimensional integral over `[a, b] × [c, d]`.
pub fn integrate_2d<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    (a, b): (f64, f64),
    (c, d): (f64, f64),
    abs_tol: f64,
) -> f64 {
    let span = (b - a).abs().max(1e-300);
    integrate(
        |x| integrate(|y| f(x, y), c, d, abs_tol / span * 0.1, 1e-14, 400).value,
        a,
        b,
        abs_tol,
        1e-14,
        400,
    )
    .value
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x, 0.0, 2.0, 1e-14, 0.0, 10);
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn oscillatory() {
        let r = integrate(|x| (20.0 * x).cos(), 0.0, 3.0, 1e-13, 0.0, 500);
        assert!((r.value - (60.0f64).sin() / 20.0).abs() < 1e-12);
    }

    #[test]
    fn gaussian_2d() {
        let v = integrate_2d(
            |x, y| (-std::f64::consts::PI * (x * x + y * y)).exp(),
            (-6.0, 6.0),
            (-6.0, 6.0),
            1e-12,
        );
        assert!((v - 1.0).abs() < 1e-11);
    }
}
