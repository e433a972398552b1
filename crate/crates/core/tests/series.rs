use proptest::prelude::*;
use randeuler::series::dense::Basis;
use randeuler::{Complex64, Monomial, TruncatedSeries};
use std::collections::HashMap;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn z(m: usize) -> Monomial {
    Monomial::new(&[0], &[m])
}

/// Schoolbook product over a hash map, truncated afterwards.
fn naive_product(a: &TruncatedSeries, b: &TruncatedSeries) -> HashMap<Monomial, Complex64> {
    let mut out = HashMap::new();
    for (ma, ca) in a.iter() {
        for (mb, cb) in b.iter() {
            let mut m = Monomial::ONE;
            for j in 0..m.k.len() {
                m.k[j] = ma.k[j] + mb.k[j];
                m.l[j] = ma.l[j] + mb.l[j];
            }
            *out.entry(m).or_insert(c(0.0, 0.0)) += ca * cb;
        }
    }
    out.retain(|m, _| m.degree() <= a.cutoff());
    out
}

fn close(a: &TruncatedSeries, b: &TruncatedSeries, tol: f64) -> bool {
    a.iter()
        .chain(b.iter())
        .all(|(m, _)| (a.get(m) - b.get(m)).norm() <= tol)
}

fn arb_series(j: usize, cutoff: usize, constant: bool) -> impl Strategy<Value = TruncatedSeries> {
    let slot = (
        prop::collection::vec(0usize..=3, j),
        prop::collection::vec(0usize..=3, j),
        -1.0f64..1.0,
        -1.0f64..1.0,
    );
    prop::collection::vec(slot, 0..10).prop_map(move |terms| {
        let mut s = TruncatedSeries::zero(j, cutoff).unwrap();
        for (k, l, re, im) in terms {
            let m = Monomial::new(&k, &l);
            let d = m.degree();
            if d <= cutoff && (constant || d > 0) {
                s.add_term(m, c(re, im)).unwrap();
            }
        }
        s
    })
}

fn triple(
    constant: bool,
) -> impl Strategy<Value = (TruncatedSeries, TruncatedSeries, TruncatedSeries)> {
    (1usize..=2, 2usize..=6).prop_flat_map(move |(j, n)| {
        (
            arb_series(j, n, constant),
            arb_series(j, n, constant),
            arb_series(j, n, constant),
        )
    })
}

#[test]
fn difference_of_squares() {
    let a = TruncatedSeries::from_terms(1, 4, [(Monomial::ONE, c(1.0, 0.0)), (z(1), c(1.0, 0.0))])
        .unwrap();
    let b = TruncatedSeries::from_terms(1, 4, [(Monomial::ONE, c(1.0, 0.0)), (z(1), c(-1.0, 0.0))])
        .unwrap();
    let p = a.mul(&b).unwrap();
    assert_eq!(p.get(&Monomial::ONE), c(1.0, 0.0));
    assert_eq!(p.get(&z(1)), c(0.0, 0.0));
    assert_eq!(p.get(&z(2)), c(-1.0, 0.0));
    assert_eq!(p.valuation(), Some(0));
}

#[test]
fn geometric_square_counts() {
    let n = 8;
    let g = TruncatedSeries::from_terms(1, n, (0..=n).map(|m| (z(m), c(1.0, 0.0)))).unwrap();
    let sq = g.mul(&g).unwrap();
    for m in 0..=n {
        assert_eq!(sq.get(&z(m)), c((m + 1) as f64, 0.0));
    }
    assert_eq!(sq.len(), n + 1);
}

#[test]
fn log1p_of_norm_square() {
    let zz = Monomial::new(&[1], &[1]);
    let s = TruncatedSeries::from_terms(1, 6, [(zz, c(1.0, 0.0))]).unwrap();
    let l = s.log1p().unwrap();
    assert_eq!(l.get(&zz), c(1.0, 0.0));
    assert_eq!(l.get(&Monomial::new(&[2], &[2])), c(-0.5, 0.0));
    assert!((l.get(&Monomial::new(&[3], &[3])) - c(1.0 / 3.0, 0.0)).norm() < 1e-16);
    assert_eq!(l.len(), 3);
}

#[test]
fn exp_of_linear() {
    let a = c(0.3, -1.2);
    let n = 10;
    let e = TruncatedSeries::from_terms(1, n, [(z(1), a)])
        .unwrap()
        .exp()
        .unwrap();
    let mut fact = 1.0;
    for m in 0..=n {
        if m > 0 {
            fact *= m as f64;
        }
        let want = a.powu(m as u32) / fact;
        assert!((e.get(&z(m)) - want).norm() <= 1e-15 * want.norm().max(1e-300));
    }
}

#[test]
fn nonzero_constant_refused() {
    let s = TruncatedSeries::one(1, 4).unwrap();
    assert!(s.log1p().is_err());
    assert!(s.exp().is_err());
    assert!(TruncatedSeries::zero(0, 4).is_err());
    let mut t = TruncatedSeries::zero(1, 2).unwrap();
    assert!(t.add_term(z(3), c(1.0, 0.0)).is_err());
    assert!(t
        .add_term(Monomial::new(&[0, 1], &[0, 0]), c(1.0, 0.0))
        .is_err());
}

#[test]
fn real_coordinates_of_norm_square() {
    // z̄z = x² + y².
    let s = TruncatedSeries::from_terms(1, 2, [(Monomial::new(&[1], &[1]), c(1.0, 0.0))]).unwrap();
    let r = s.to_real_coordinates();
    assert_eq!(r.get(&Monomial::new(&[2], &[0])), c(1.0, 0.0));
    assert_eq!(r.get(&Monomial::new(&[0], &[2])), c(1.0, 0.0));
    assert_eq!(r.get(&Monomial::new(&[1], &[1])), c(0.0, 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn product_matches_schoolbook((a, b, _) in triple(true)) {
        let p = a.mul(&b).unwrap();
        let naive = naive_product(&a, &b);
        for (m, v) in &naive {
            prop_assert!((p.get(m) - v).norm() <= 1e-13);
        }
        for (m, v) in p.iter() {
            prop_assert!(naive.contains_key(m) || v.norm() == 0.0);
        }
    }

    #[test]
    fn ring_axioms((a, b, cc) in triple(true)) {
        prop_assert!(close(&a.mul(&b).unwrap(), &b.mul(&a).unwrap(), 1e-13));
        let left = a.mul(&b).unwrap().mul(&cc).unwrap();
        let right = a.mul(&b.mul(&cc).unwrap()).unwrap();
        prop_assert!(close(&left, &right, 1e-12));
        let dist = a.mul(&b.add(&cc).unwrap()).unwrap();
        let split = a.mul(&b).unwrap().add(&a.mul(&cc).unwrap()).unwrap();
        prop_assert!(close(&dist, &split, 1e-12));
        let one = TruncatedSeries::one(a.j(), a.cutoff()).unwrap();
        prop_assert!(close(&a.mul(&one).unwrap(), &a, 0.0));
        prop_assert!(close(&a.sub(&a).unwrap(), &TruncatedSeries::zero(a.j(), a.cutoff()).unwrap(), 0.0));
    }

    #[test]
    fn exp_and_log1p_are_inverse((a, _, _) in triple(false)) {
        let small = a.scale(c(0.25, 0.0));
        let one = TruncatedSeries::one(a.j(), a.cutoff()).unwrap();
        let back = small.exp().unwrap().sub(&one).unwrap().log1p().unwrap();
        prop_assert!(close(&back, &small, 1e-12));
        let there = small.log1p().unwrap().exp().unwrap().sub(&one).unwrap();
        prop_assert!(close(&there, &small, 1e-12));
    }

    #[test]
    fn exp_is_multiplicative((a, b, _) in triple(false)) {
        let lhs = a.add(&b).unwrap().exp().unwrap();
        let rhs = a.exp().unwrap().mul(&b.exp().unwrap()).unwrap();
        prop_assert!(close(&lhs, &rhs, 1e-11));
    }

    #[test]
    fn homogeneity_matches_substitution((a, _, _) in triple(true), lam in 0.1f64..2.0, x in -0.5f64..0.5, y in -0.5f64..0.5) {
        let scaled = a.scale_by_degree(|n| c(lam.powi(n as i32), 0.0));
        let pt: Vec<Complex64> = (0..a.j()).map(|i| c(x + 0.1 * i as f64, y)).collect();
        let moved: Vec<Complex64> = pt.iter().map(|w| w * lam).collect();
        let lhs = scaled.eval(&pt).unwrap();
        let rhs = a.eval(&moved).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn truncation_commutes_with_operations((a, b, _) in triple(false), cut in 0usize..=6) {
        let n = cut.min(a.cutoff());
        let ta = a.truncate(n).unwrap();
        let tb = b.truncate(n).unwrap();
        prop_assert_eq!(a.mul(&b).unwrap().truncate(n).unwrap(), ta.mul(&tb).unwrap());
        prop_assert_eq!(a.log1p().unwrap().truncate(n).unwrap(), ta.log1p().unwrap());
        let e = a.exp().unwrap().truncate(n).unwrap();
        prop_assert!(close(&e, &ta.exp().unwrap(), 1e-14));
    }

    #[test]
    fn dense_log1p_matches_sparse((a, _, _) in triple(false)) {
        let basis = Basis::new(a.j(), a.cutoff());
        let r = basis.from_sparse(&a);
        let mut out = vec![c(0.0, 0.0); basis.len()];
        let (mut p, mut w) = (Vec::new(), Vec::new());
        basis.log1p(&r, &mut out, &mut p, &mut w);
        let dense = basis.to_sparse(&out).unwrap();
        prop_assert!(close(&dense, &a.log1p().unwrap(), 1e-13));
    }

    #[test]
    fn real_coordinates_preserve_values((a, _, _) in triple(true), x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let r = a.to_real_coordinates();
        let pt: Vec<Complex64> = (0..a.j()).map(|i| c(x, y - 0.2 * i as f64)).collect();
        let xs: Vec<Complex64> = pt.iter().map(|w| c(w.re, 0.0)).collect();
        let ys: Vec<Complex64> = pt.iter().map(|w| c(w.im, 0.0)).collect();
        let lhs = r.eval_vars(&xs, &ys).unwrap();
        let rhs = a.eval(&pt).unwrap();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }
}
