//! The expansion's density, rectangle probabilities and characteristic
//! function.
//!
//! With `z = x + iy` the characteristic function of the random model is
//! approximately `e^{Q_T(z)} Σ (2πi)^{𝒦(k+l)} b_{k,l} x^k y^l`. Fourier
//! inversion turns each monomial into a product of Hermite functions, which
//! gives the density `H_T(u, v)` and, integrated over a box, the rectangle
//! probability.
//!
//! Rectangles are in normalized units: component `j` of the real part is
//! measured in multiples of `√(π ψ_j)`, and likewise for the imaginary part.
//! In those units the leading term is the product of `e^{-π w²}` windows.

use crate::error::{Error, Result};
use crate::expansion::CoeffTable;
use crate::hermite::{fourier_hermite_unchecked, gauss_hermite_segment};
use crate::special::gaussian_mass;
use crate::sum::{ComplexSum, NeumaierSum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// The box `Π_j [a_j, b_j] × [c_j, d_j]` in normalized units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rectangle {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub d: Vec<f64>,
}

impl Rectangle {
    /// Endpoints may be infinite; `a_j = b_j` gives an empty box.
    pub fn new(a: Vec<f64>, b: Vec<f64>, c: Vec<f64>, d: Vec<f64>) -> Result<Self> {
        let j = a.len();
        if j == 0 || b.len() != j || c.len() != j || d.len() != j {
            return Err(Error::ShapeMismatch(
                "rectangle sides must all have length J".into(),
            ));
        }
        for i in 0..j {
            if a[i].is_nan() || b[i].is_nan() || c[i].is_nan() || d[i].is_nan() {
                return Err(Error::invalid("rectangle endpoint is NaN"));
            }
            if a[i] > b[i] || c[i] > d[i] {
                return Err(Error::invalid(format!(
                    "rectangle component {i} has reversed endpoints"
                )));
            }
        }
        Ok(Self { a, b, c, d })
    }

    pub fn full(j: usize) -> Self {
        let inf = vec![f64::INFINITY; j];
        let ninf = vec![f64::NEG_INFINITY; j];
        Self {
            a: ninf.clone(),
            b: inf.clone(),
            c: ninf,
            d: inf,
        }
    }

    /// `[-h, h]^{2J}`.
    pub fn centered(j: usize, h: f64) -> Self {
        Self {
            a: vec![-h; j],
            b: vec![h; j],
            c: vec![-h; j],
            d: vec![h; j],
        }
    }

    /// The same box for every component.
    pub fn uniform(j: usize, a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        Self::new(vec![a; j], vec![b; j], vec![c; j], vec![d; j])
    }

    pub fn j(&self) -> usize {
        self.a.len()
    }

    /// Parses `a,b,c,d` per component, components separated by `;`.
    /// `inf` and `-inf` are accepted.
    pub fn parse(s: &str) -> Result<Self> {
        let (mut a, mut b, mut c, mut d) = (vec![], vec![], vec![], vec![]);
        for comp in s.split(';') {
            let v: Vec<f64> = comp
                .split(',')
                .map(|x| x.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::invalid(format!("bad rectangle component `{comp}`")))?;
            if v.len() != 4 {
                return Err(Error::invalid(format!(
                    "rectangle component `{comp}` needs four numbers a,b,c,d"
                )));
            }
            a.push(v[0]);
            b.push(v[1]);
            c.push(v[2]);
            d.push(v[3]);
        }
        Self::new(a, b, c, d)
    }

    /// Inverse of [`Rectangle::parse`].
    pub fn label(&self) -> String {
        (0..self.j())
            .map(|i| format!("{},{},{},{}", self.a[i], self.b[i], self.c[i], self.d[i]))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Half-open membership test `[a, b) × [c, d)` for normalized values.
    #[inline]
    pub fn contains(&self, re: &[f64], im: &[f64]) -> bool {
        (0..self.j()).all(|i| {
            re[i] >= self.a[i] && re[i] < self.b[i] && im[i] >= self.c[i] && im[i] < self.d[i]
        })
    }

    fn check(&self, table: &CoeffTable) -> Result<()> {
        if self.j() != table.j {
            return Err(Error::ShapeMismatch(format!(
                "rectangle has J = {}, table has J = {}",
                self.j(),
                table.j
            )));
        }
        Ok(())
    }
}

/// `H_T(u, v)` at unnormalized `u = log|L|`, `v = arg L` vectors.
///
/// Far in the tails the truncated sum can dip slightly below zero.
pub fn density(table: &CoeffTable, u: &[f64], v: &[f64]) -> Result<f64> {
    let jn = table.j;
    if u.len() != jn || v.len() != jn {
        return Err(Error::ShapeMismatch(format!(
            "density needs {jn} coordinates per part"
        )));
    }
    let n = table.max_degree();
    let fu: Vec<Vec<f64>> = (0..jn)
        .map(|j| {
            (0..=n)
                .map(|k| fourier_hermite_unchecked(table.psi[j], k, u[j]))
                .collect()
        })
        .collect();
    let fv: Vec<Vec<f64>> = (0..jn)
        .map(|j| {
            (0..=n)
                .map(|k| fourier_hermite_unchecked(table.psi[j], k, v[j]))
                .collect()
        })
        .collect();
    let mut acc = NeumaierSum::new();
    for e in &table.entries {
        let mut t = e.value;
        for j in 0..jn {
            t *= fu[j][e.k[j] as usize] * fv[j][e.l[j] as usize];
        }
        acc.add(t);
    }
    Ok(acc.value())
}

/// Per-degree contributions `Σ_{𝒦(k+l)=n} b_{k,l} · (segment products)`.
fn probability_by_degree(table: &CoeffTable, rect: &Rectangle) -> Result<Vec<f64>> {
    rect.check(table)?;
    let jn = table.j;
    let n = table.max_degree();
    let su: Vec<Vec<f64>> = (0..jn)
        .map(|j| {
            (0..=n)
                .map(|k| {
                    table.psi[j].powf(-(k as f64) / 2.0)
                        * gauss_hermite_segment(k, rect.a[j], rect.b[j])
                })
                .collect()
        })
        .collect();
    let sv: Vec<Vec<f64>> = (0..jn)
        .map(|j| {
            (0..=n)
                .map(|k| {
                    table.psi[j].powf(-(k as f64) / 2.0)
                        * gauss_hermite_segment(k, rect.c[j], rect.d[j])
                })
                .collect()
        })
        .collect();
    let mut by_degree = vec![NeumaierSum::new(); n + 1];
    for e in &table.entries {
        let mut t = e.value;
        for j in 0..jn {
            t *= su[j][e.k[j] as usize] * sv[j][e.l[j] as usize];
        }
        by_degree[e.degree()].add(t);
    }
    Ok(by_degree.iter().map(NeumaierSum::value).collect())
}

/// `Φ_T^rand(R_T)` from the closed-form Gaussian–Hermite segment integrals.
pub fn probability(table: &CoeffTable, rect: &Rectangle) -> Result<f64> {
    let parts = probability_by_degree(table, rect)?;
    let mut acc = NeumaierSum::new();
    for p in parts {
        acc.add(p);
    }
    Ok(acc.value())
}

/// The probability with a truncation estimate: the absolute contribution of
/// the two highest degrees present, used as a proxy for the omitted ones.
pub fn probability_with_estimate(table: &CoeffTable, rect: &Rectangle) -> Result<(f64, f64)> {
    let parts = probability_by_degree(table, rect)?;
    let value = parts.iter().copied().collect::<NeumaierSum>().value();
    let n = parts.len() - 1;
    let estimate = if n >= 3 {
        parts[n].abs() + parts[n - 1].abs()
    } else {
        0.0
    };
    Ok((value, estimate))
}

/// Product of the Gaussian window masses `∫ e^{-πw²} dw` over the sides.
pub fn gaussian_leading(rect: &Rectangle) -> f64 {
    (0..rect.j())
        .map(|j| gaussian_mass(rect.a[j], rect.b[j]) * gaussian_mass(rect.c[j], rect.d[j]))
        .product()
}

/// `e^{Q_T(z)} Σ (2πi)^{𝒦(k+l)} b_{k,l} x^k y^l` for `‖z‖ ≤ δ₂`.
pub fn char_function(table: &CoeffTable, x: &[f64], y: &[f64]) -> Result<Complex64> {
    let norm = x.iter().chain(y).map(|t| t * t).sum::<f64>().sqrt();
    let radius = table.config.delta2;
    if norm > radius {
        return Err(Error::OutsideRadius { norm, radius });
    }
    char_function_series(table, x, y)
}

/// The same truncated expression without the radius check. Beyond `δ₂` it
/// is no longer an approximation of the true characteristic function, but
/// it is exactly the function whose Fourier transform is [`density`].
pub fn char_function_series(table: &CoeffTable, x: &[f64], y: &[f64]) -> Result<Complex64> {
    let jn = table.j;
    if x.len() != jn || y.len() != jn {
        return Err(Error::ShapeMismatch(format!(
            "char_function needs {jn} coordinates per part"
        )));
    }
    let q: f64 = -PI
        * PI
        * (0..jn)
            .map(|j| table.psi[j] * (x[j] * x[j] + y[j] * y[j]))
            .sum::<f64>();
    let two_pi_i = Complex64::new(0.0, 2.0 * PI);
    let mut acc = ComplexSum::new();
    for e in &table.entries {
        let mut t = two_pi_i.powu(e.degree() as u32) * e.value;
        for j in 0..jn {
            t *= x[j].powi(e.k[j] as i32) * y[j].powi(e.l[j] as i32);
        }
        acc.add(t);
    }
    Ok(acc.value() * q.exp())
}

/// `Q_T(z) = −π² Σ ψ_j |z_j|²`.
pub fn q_t(table: &CoeffTable, x: &[f64], y: &[f64]) -> f64 {
    -PI * PI
        * (0..table.j)
            .map(|j| table.psi[j] * (x[j] * x[j] + y[j] * y[j]))
            .sum::<f64>()
}

/// Density values on a grid in the plane of component `j`, the other
/// components held at zero. Returns `(u, v, H_T)` rows with `u` varying
/// slowest.
pub fn density_grid(
    table: &CoeffTable,
    j: usize,
    u_range: (f64, f64),
    v_range: (f64, f64),
    nu: usize,
    nv: usize,
) -> Result<Vec<(f64, f64, f64)>> {
    if j >= table.j {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: table.j,
        });
    }
    if nu < 2 || nv < 2 {
        return Err(Error::invalid(
            "a density grid needs at least 2 points per axis",
        ));
    }
    let mut out = Vec::with_capacity(nu * nv);
    let (mut u, mut v) = (vec![0.0; table.j], vec![0.0; table.j]);
    for iu in 0..nu {
        u[j] = u_range.0 + (u_range.1 - u_range.0) * iu as f64 / (nu - 1) as f64;
        for iv in 0..nv {
            v[j] = v_range.0 + (v_range.1 - v_range.0) * iv as f64 / (nv - 1) as f64;
            out.push((u[j], v[j], density(table, &u, &v)?));
        }
    }
    Ok(out)
}

/// CDF of the normalized real part of component `j`, `log|L_j| / √(πψ_j)`.
pub fn marginal_cdf_re(table: &CoeffTable, j: usize, w: f64) -> Result<f64> {
    let mut r = Rectangle::full(table.j);
    if j >= table.j {
        return Err(Error::IndexOutOfRange {
            index: j,
            limit: table.j,
        });
    }
    r.b[j] = w;
    probability(table, &r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expansion::{b_table, ExpansionConfig};
    use crate::lfunction::LFunctionSpec;

    fn table() -> CoeffTable {
        let cfg = ExpansionConfig {
            cutoff: 6,
            p_max: 2000,
            ..Default::default()
        };
        b_table(&LFunctionSpec::zeta(), 0.4, 1e4, &cfg).unwrap()
    }

    #[test]
    fn closed_form_identities() {
        let t = table();
        assert_eq!(probability(&t, &Rectangle::full(1)).unwrap(), 1.0);
        let empty = Rectangle::uniform(1, 0.3, 0.3, -1.0, 1.0).unwrap();
        assert_eq!(probability(&t, &empty).unwrap(), 0.0);
        assert_eq!(gaussian_leading(&Rectangle::full(2)), 1.0);
        let half = Rectangle::new(
            vec![0.0],
            vec![f64::INFINITY],
            vec![f64::NEG_INFINITY],
            vec![f64::INFINITY],
        )
        .unwrap();
        assert!((gaussian_leading(&half) - 0.5).abs() < 1e-16);
        assert_eq!(
            char_function(&t, &[0.0], &[0.0]).unwrap(),
            Complex64::new(1.0, 0.0)
        );
        assert!(char_function(&t, &[0.1], &[0.0]).is_err());
    }

    #[test]
    fn leading_only_density_is_gaussian() {
        let mut t = table();
        t.entries.truncate(1);
        let psi = t.psi[0];
        let (u, v) = (0.4, -1.1);
        let expect = (PI * psi).recip() * (-(u * u + v * v) / psi).exp();
        assert!((density(&t, &[u], &[v]).unwrap() - expect).abs() < 1e-16);
    }

    #[test]
    fn rectangle_parsing() {
        let r = Rectangle::parse("-1,1,-inf,inf;0,2,0,1").unwrap();
        assert_eq!(r.j(), 2);
        assert_eq!(Rectangle::parse(&r.label()).unwrap(), r);
        assert!(Rectangle::parse("1,0,0,1").is_err());
        assert!(Rectangle::parse("1,2,3").is_err());
        assert!(r.contains(&[0.0, 0.0], &[5.0, 0.5]));
        assert!(!r.contains(&[1.0, 0.0], &[5.0, 0.5]));
    }

    #[test]
    fn conjugate_symmetry() {
        let t = table();
        let a = char_function(&t, &[0.02], &[-0.03]).unwrap();
        let b = char_function(&t, &[-0.02], &[0.03]).unwrap();
        assert!((a.conj() - b).norm() < 1e-12);
    }
}
