use proptest::prelude::*;
use randeuler::distribution::{
    char_function_series, density_grid, marginal_cdf_re, probability_with_estimate,
};
use randeuler::hermite::gaussian_fourier_hermite;
use randeuler::local::local_char_quadrature;
use randeuler::primes::primes_up_to;
use randeuler::quad::{integrate, integrate_2d};
use randeuler::{
    b_table, char_function, density, gaussian_leading, probability, CoeffTable, Complex64,
    ExpansionConfig, LFunctionSpec, Rectangle,
};
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Largest negative excursion tolerated from the truncated expansion.
const DIP: f64 = 2.5e-4;

fn config(cutoff: usize, p_max: u64) -> ExpansionConfig {
    ExpansionConfig {
        cutoff,
        p_max,
        ..Default::default()
    }
}

fn zeta_table() -> &'static CoeffTable {
    static T: OnceLock<CoeffTable> = OnceLock::new();
    T.get_or_init(|| b_table(&LFunctionSpec::zeta(), 0.4, 1e4, &config(8, 10_000)).unwrap())
}

fn pair_table() -> &'static CoeffTable {
    static T: OnceLock<CoeffTable> = OnceLock::new();
    T.get_or_init(|| b_table(&LFunctionSpec::chi3_chi4(), 0.4, 1e4, &config(6, 10_000)).unwrap())
}

/// `∫ F_k(u) du` over the unnormalized image of `[a, b]`, by quadrature of
/// the density's one-dimensional factor.
fn side_by_quadrature(psi: f64, k: usize, a: f64, b: f64) -> f64 {
    let s = (PI * psi).sqrt();
    integrate(
        |u| gaussian_fourier_hermite(psi, k, u).unwrap(),
        a * s,
        b * s,
        1e-14,
        1e-13,
        400,
    )
    .value
}

fn probability_by_quadrature(t: &CoeffTable, r: &Rectangle) -> f64 {
    t.entries
        .iter()
        .map(|e| {
            let mut v = e.value;
            for j in 0..t.j {
                v *= side_by_quadrature(t.psi[j], e.k[j] as usize, r.a[j], r.b[j]);
                v *= side_by_quadrature(t.psi[j], e.l[j] as usize, r.c[j], r.d[j]);
            }
            v
        })
        .sum()
}

#[test]
fn leading_term_alone_is_the_gaussian() {
    let mut t = pair_table().clone();
    t.entries.truncate(1);
    for r in [
        Rectangle::centered(2, 1.0),
        Rectangle::parse("-0.3,2,-inf,0;0.1,0.4,-1,1").unwrap(),
        Rectangle::parse("-inf,0,-inf,inf;-inf,inf,0,inf").unwrap(),
    ] {
        assert!((probability(&t, &r).unwrap() - gaussian_leading(&r)).abs() < 1e-15);
    }
    assert!(
        (gaussian_leading(&Rectangle::parse("-inf,0,-inf,inf;-inf,inf,0,inf").unwrap()) - 0.25)
            .abs()
            < 1e-16
    );
}

#[test]
fn full_and_empty_boxes() {
    for t in [zeta_table(), pair_table()] {
        assert_eq!(probability(t, &Rectangle::full(t.j)).unwrap(), 1.0);
        let mut r = Rectangle::centered(t.j, 1.0);
        r.a[0] = 0.5;
        r.b[0] = 0.5;
        assert_eq!(probability(t, &r).unwrap(), 0.0);
    }
    assert!(probability(zeta_table(), &Rectangle::full(2)).is_err());
}

#[test]
fn two_component_boxes_against_quadrature() {
    let t = pair_table();
    for r in [
        Rectangle::centered(2, 1.0),
        Rectangle::parse("-0.5,1.5,-1,0.2;0,0.7,-2,2").unwrap(),
        Rectangle::parse("-2,-1,0,1;1,2.5,-0.5,0.5").unwrap(),
    ] {
        let closed = probability(t, &r).unwrap();
        let quad = probability_by_quadrature(t, &r);
        assert!(
            (closed - quad).abs() < 1e-10,
            "{}: {closed} vs {quad}",
            r.label()
        );
    }
}

#[test]
fn char_function_matches_truncated_euler_product() {
    let spec = LFunctionSpec::zeta();
    let t = zeta_table();
    let primes = primes_up_to(10_000);
    for (x, y) in [(0.03, 0.0), (0.0, -0.04), (0.025, 0.025), (-0.01, 0.045)] {
        let mut prod = Complex64::new(1.0, 0.0);
        for &p in &primes {
            prod *= local_char_quadrature(&spec, p, t.sigma_t, &[x], &[y], 64).unwrap();
        }
        let approx = char_function(t, &[x], &[y]).unwrap();
        assert!(
            (approx - prod).norm() < 1e-3,
            "({x}, {y}): {approx} vs {prod}"
        );
    }
    assert!(char_function(t, &[0.04], &[0.04]).is_err());
}

#[test]
fn density_is_the_fourier_transform_of_the_series() {
    let t = zeta_table();
    let direct = density(t, &[0.0], &[0.0]).unwrap();
    let inverse = integrate_2d(
        |x, y| char_function_series(t, &[x], &[y]).unwrap().re,
        (-1.0, 1.0),
        (-1.0, 1.0),
        1e-9,
    );
    assert!((direct - inverse).abs() < 1e-4, "{direct} vs {inverse}");
    let (u, v) = (0.7, -0.4);
    let shifted = integrate_2d(
        |x, y| {
            let phase = Complex64::from_polar(1.0, -2.0 * PI * (x * u + y * v));
            (char_function_series(t, &[x], &[y]).unwrap() * phase).re
        },
        (-1.0, 1.0),
        (-1.0, 1.0),
        1e-9,
    );
    assert!((density(t, &[u], &[v]).unwrap() - shifted).abs() < 1e-4);
}

#[test]
fn density_grid_and_marginal() {
    let t = zeta_table();
    let g = density_grid(t, 0, (-1.0, 1.0), (-2.0, 2.0), 3, 5).unwrap();
    assert_eq!(g.len(), 15);
    assert_eq!((g[0].0, g[0].1), (-1.0, -2.0));
    assert_eq!((g[14].0, g[14].1), (1.0, 2.0));
    assert_eq!(g[7].2, density(t, &[0.0], &[0.0]).unwrap());
    // The truncated series dips below zero in the tails, at the 1e-4 level here.
    let mut last = 0.0;
    for i in -30..=30 {
        let c = marginal_cdf_re(t, 0, i as f64 / 10.0).unwrap();
        assert!(c >= last - DIP, "{i}: {c} < {last}");
        assert!((-DIP..=1.0 + DIP).contains(&c));
        last = c;
    }
    assert!((marginal_cdf_re(t, 0, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);
    assert!(density_grid(t, 1, (0.0, 1.0), (0.0, 1.0), 3, 3).is_err());
}

#[test]
fn truncation_estimate_is_reported() {
    let (p, est) = probability_with_estimate(zeta_table(), &Rectangle::centered(1, 1.0)).unwrap();
    assert_eq!(
        p,
        probability(zeta_table(), &Rectangle::centered(1, 1.0)).unwrap()
    );
    assert!(est > 0.0 && est < 0.05, "{est}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conjugate_symmetry(x1 in -0.024f64..0.024, y1 in -0.024f64..0.024, x2 in -0.024f64..0.024, y2 in -0.024f64..0.024) {
        let t = pair_table();
        let a = char_function(t, &[x1, x2], &[y1, y2]).unwrap();
        let b = char_function(t, &[-x1, -x2], &[-y1, -y2]).unwrap();
        prop_assert!((a.conj() - b).norm() < 1e-14);
    }

    #[test]
    fn nested_boxes_are_monotone(a in -2.5f64..0.0, b in 0.0f64..2.5, c in -2.5f64..0.0, d in 0.0f64..2.5,
                                 grow in 0.0f64..1.0) {
        let t = zeta_table();
        let inner = Rectangle::uniform(1, a, b, c, d).unwrap();
        let outer = Rectangle::uniform(1, a - grow, b + grow, c - grow, d + grow).unwrap();
        prop_assert!(probability(t, &outer).unwrap() >= probability(t, &inner).unwrap() - 4.0 * DIP);
    }

    #[test]
    fn boxes_are_additive(a in -2.0f64..0.0, m in 0.0f64..1.0, b in 1.0f64..2.0) {
        let t = pair_table();
        let whole = Rectangle::parse(&format!("{a},{b},-1,1;-1,1,-1,1")).unwrap();
        let left = Rectangle::parse(&format!("{a},{m},-1,1;-1,1,-1,1")).unwrap();
        let right = Rectangle::parse(&format!("{m},{b},-1,1;-1,1,-1,1")).unwrap();
        let sum = probability(t, &left).unwrap() + probability(t, &right).unwrap();
        prop_assert!((probability(t, &whole).unwrap() - sum).abs() < 1e-13);
    }
}
