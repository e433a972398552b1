//! Truncated power series in the `2J` variables `(z̄_1, …, z̄_J, z_1, …, z_J)`.
//!
//! A monomial `z̄^k z^l` is keyed by the exponent pair `(k, l)`; its degree is
//! `𝒦(k + l) = Σ_j (k_j + l_j)`. Coefficients above the cutoff are never
//! stored. Map iteration is lexicographic in `(k, l)`, which fixes the order
//! of every floating-point accumulation: a computation at cutoff `N`
//! truncated to `N' < N` is bit-identical to the same computation at `N'`.
//!
//! [`dense`] holds an indexed variant for the per-prime hot loop.

pub mod dense;

use crate::error::{Error, Result};
use crate::lfunction::MAX_J;
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::fmt::Write as _;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Exponent pair `(k, l)`; unused slots beyond `J` stay zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial {
    pub k: [u8; MAX_J],
    pub l: [u8; MAX_J],
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        k: [0; MAX_J],
        l: [0; MAX_J],
    };

    /// Panics if a slice is longer than [`MAX_J`] or an exponent exceeds 255.
    pub fn new(k: &[usize], l: &[usize]) -> Self {
        assert!(k.len() <= MAX_J && l.len() <= MAX_J, "too many variables");
        let mut m = Self::ONE;
        for (d, s) in m.k.iter_mut().zip(k) {
            *d = u8::try_from(*s).expect("exponent fits in u8");
        }
        for (d, s) in m.l.iter_mut().zip(l) {
            *d = u8::try_from(*s).expect("exponent fits in u8");
        }
        m
    }

    /// `z̄_j` (when `conj`) or `z_j`.
    pub fn var(j: usize, conj: bool) -> Self {
        let mut m = Self::ONE;
        if conj {
            m.k[j] = 1;
        } else {
            m.l[j] = 1;
        }
        m
    }

    pub fn degree(&self) -> usize {
        self.k_degree() + self.l_degree()
    }

    pub fn k_degree(&self) -> usize {
        self.k.iter().map(|&e| e as usize).sum()
    }

    pub fn l_degree(&self) -> usize {
        self.l.iter().map(|&e| e as usize).sum()
    }

    pub fn times(&self, other: &Monomial) -> Monomial {
        let mut m = *self;
        for j in 0..MAX_J {
            m.k[j] += other.k[j];
            m.l[j] += other.l[j];
        }
        m
    }

    /// Swaps the roles of `z̄` and `z`.
    pub fn swapped(&self) -> Monomial {
        Monomial {
            k: self.l,
            l: self.k,
        }
    }

    /// `k! l!` as a float.
    pub fn factorial(&self) -> f64 {
        self.k
            .iter()
            .chain(&self.l)
            .map(|&e| (1..=e as u32).map(f64::from).product::<f64>())
            .product()
    }

    /// Key for graded ordering: degree first, then lexicographic.
    pub fn graded_key(&self) -> (usize, Monomial) {
        (self.degree(), *self)
    }

    /// `(k_1,…,k_J)` rendered for `J` slots.
    pub fn k_tuple(&self, j: usize) -> String {
        tuple(&self.k[..j])
    }

    pub fn l_tuple(&self, j: usize) -> String {
        tuple(&self.l[..j])
    }

    fn fits(&self, j: usize) -> bool {
        self.k[j..].iter().chain(&self.l[j..]).all(|&e| e == 0)
    }
}

fn tuple(e: &[u8]) -> String {
    let parts: Vec<String> = e.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(","))
}

/// Sparse truncated series with complex coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedSeries {
    j: usize,
    cutoff: usize,
    coeffs: BTreeMap<Monomial, Complex64>,
}

impl TruncatedSeries {
    /// The zero series in `J` variable pairs with total-degree cutoff `N`.
    pub fn zero(j: usize, cutoff: usize) -> Result<Self> {
        if j == 0 || j > MAX_J {
            return Err(Error::invalid(format!("J must be in 1..={MAX_J}, got {j}")));
        }
        if cutoff > u8::MAX as usize {
            return Err(Error::invalid(format!("cutoff {cutoff} is too large")));
        }
        Ok(Self {
            j,
            cutoff,
            coeffs: BTreeMap::new(),
        })
    }

    pub fn one(j: usize, cutoff: usize) -> Result<Self> {
        let mut s = Self::zero(j, cutoff)?;
        s.coeffs.insert(Monomial::ONE, ONE);
        Ok(s)
    }

    pub fn from_terms(
        j: usize,
        cutoff: usize,
        terms: impl IntoIterator<Item = (Monomial, Complex64)>,
    ) -> Result<Self> {
        let mut s = Self::zero(j, cutoff)?;
        for (m, c) in terms {
            s.add_term(m, c)?;
        }
        Ok(s)
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of `m` (zero when absent).
    pub fn get(&self, m: &Monomial) -> Complex64 {
        self.coeffs.get(m).copied().unwrap_or(ZERO)
    }

    /// Lexicographic iteration over stored terms.
    pub fn iter(&self) -> impl Iterator<Item = (&Monomial, &Complex64)> {
        self.coeffs.iter()
    }

    /// Adds `c` to the coefficient of `m`.
    pub fn add_term(&mut self, m: Monomial, c: Complex64) -> Result<()> {
        self.check_monomial(&m)?;
        *self.coeffs.entry(m).or_insert(ZERO) += c;
        Ok(())
    }

    /// Overwrites the coefficient of `m`.
    pub fn set(&mut self, m: Monomial, c: Complex64) -> Result<()> {
        self.check_monomial(&m)?;
        self.coeffs.insert(m, c);
        Ok(())
    }

    fn check_monomial(&self, m: &Monomial) -> Result<()> {
        if !m.fits(self.j) {
            return Err(Error::ShapeMismatch(format!(
                "monomial uses variables beyond J = {}",
                self.j
            )));
        }
        if m.degree() > self.cutoff {
            return Err(Error::DegreeOutOfRange {
                degree: m.degree(),
                cutoff: self.cutoff,
            });
        }
        Ok(())
    }

    fn check_shape(&self, other: &Self) -> Result<()> {
        if self.j != other.j || self.cutoff != other.cutoff {
            return Err(Error::ShapeMismatch(format!(
                "(J={}, N={}) vs (J={}, N={})",
                self.j, self.cutoff, other.j, other.cutoff
            )));
        }
        Ok(())
    }

    pub fn constant_term(&self) -> Complex64 {
        self.get(&Monomial::ONE)
    }

    /// Lowest degree carrying a nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs
            .iter()
            .filter(|(_, c)| **c != ZERO)
            .map(|(m, _)| m.degree())
            .min()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = self.clone();
        for (m, c) in &other.coeffs {
            *out.coeffs.entry(*m).or_insert(ZERO) += c;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        for v in out.coeffs.values_mut() {
            *v *= c;
        }
        out
    }

    /// Multiplies the degree-`n` part by `f(n)` for every `n`.
    pub fn scale_by_degree(&self, f: impl Fn(usize) -> Complex64) -> Self {
        let mut out = self.clone();
        for (m, v) in out.coeffs.iter_mut() {
            *v *= f(m.degree());
        }
        out
    }

    /// Cauchy product with every term above the cutoff discarded.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_shape(other)?;
        let mut out = BTreeMap::new();
        for (ma, ca) in &self.coeffs {
            let da = ma.degree();
            for (mb, cb) in &other.coeffs {
                if da + mb.degree() > self.cutoff {
                    continue;
                }
                *out.entry(ma.times(mb)).or_insert(ZERO) += ca * cb;
            }
        }
        Ok(Self {
            j: self.j,
            cutoff: self.cutoff,
            coeffs: out,
        })
    }

    fn require_zero_constant(&self) -> Result<()> {
        let c = self.constant_term();
        if c != ZERO {
            return Err(Error::NonZeroConstant(format!("{c}")));
        }
        Ok(())
    }

    /// Highest power that can still reach degree `N`.
    fn power_limit(&self) -> usize {
        match self.valuation() {
            Some(v) if v > 0 => self.cutoff / v,
            _ => 0,
        }
    }

    /// `log(1 + R) = Σ_m (-1)^{m-1} R^m / m`; powers stop once `m·val(R)`
    /// exceeds the cutoff (`⌊N/2⌋` for a series starting at degree two).
    pub fn log1p(&self) -> Result<Self> {
        self.require_zero_constant()?;
        let mut out = Self::zero(self.j, self.cutoff)?;
        let mut power = self.clone();
        for m in 1..=self.power_limit() {
            if m > 1 {
                power = power.mul(self)?;
            }
            let w = if m % 2 == 1 { 1.0 } else { -1.0 } / m as f64;
            for (k, c) in &power.coeffs {
                *out.coeffs.entry(*k).or_insert(ZERO) += c * w;
            }
        }
        Ok(out)
    }

    /// `exp(S) = Σ_r S^r / r!` for a series without constant term.
    pub fn exp(&self) -> Result<Self> {
        self.require_zero_constant()?;
        let mut out = Self::one(self.j, self.cutoff)?;
        let mut term = Self::one(self.j, self.cutoff)?;
        for r in 1..=self.power_limit() {
            term = term.mul(self)?.scale(Complex64::new(1.0 / r as f64, 0.0));
            for (k, c) in &term.coeffs {
                *out.coeffs.entry(*k).or_insert(ZERO) += c;
            }
        }
        Ok(out)
    }

    /// The homogeneous part of degree `n`.
    pub fn extract_degree(&self, n: usize) -> Result<Self> {
        if n > self.cutoff {
            return Err(Error::DegreeOutOfRange {
                degree: n,
                cutoff: self.cutoff,
            });
        }
        Ok(Self {
            j: self.j,
            cutoff: self.cutoff,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.degree() == n)
                .map(|(m, c)| (*m, *c))
                .collect(),
        })
    }

    /// Drops every term above `n` and lowers the cutoff to `n`.
    pub fn truncate(&self, n: usize) -> Result<Self> {
        if n > self.cutoff {
            return Err(Error::DegreeOutOfRange {
                degree: n,
                cutoff: self.cutoff,
            });
        }
        Ok(Self {
            j: self.j,
            cutoff: n,
            coeffs: self
                .coeffs
                .iter()
                .filter(|(m, _)| m.degree() <= n)
                .map(|(m, c)| (*m, *c))
                .collect(),
        })
    }

    /// Evaluates with independent values for the barred and unbarred slots.
    pub fn eval_vars(&self, zbar: &[Complex64], z: &[Complex64]) -> Result<Complex64> {
        if zbar.len() != self.j || z.len() != self.j {
            return Err(Error::ShapeMismatch(format!(
                "expected {} values per slot",
                self.j
            )));
        }
        let mut acc = crate::sum::ComplexSum::new();
        for (m, c) in &self.coeffs {
            let mut t = *c;
            for j in 0..self.j {
                t *= zbar[j].powu(m.k[j] as u32) * z[j].powu(m.l[j] as u32);
            }
            acc.add(t);
        }
        Ok(acc.value())
    }

    /// Evaluates at `z`, with `z̄` its complex conjugate.
    pub fn eval(&self, z: &[Complex64]) -> Result<Complex64> {
        let zbar: Vec<Complex64> = z.iter().map(|w| w.conj()).collect();
        self.eval_vars(&zbar, z)
    }

    /// Rewrites the series in real coordinates `z = x + iy`,
    /// `z̄ = x − iy`: the result's `(k, l)` slot holds the coefficient of
    /// `x^k y^l`.
    pub fn to_real_coordinates(&self) -> Self {
        let mut out: BTreeMap<Monomial, Complex64> = BTreeMap::new();
        for (m, c) in &self.coeffs {
            // Per variable: (x − iy)^k (x + iy)^l = Σ_b w_b x^{k+l-b} y^b.
            let mut acc: Vec<(Monomial, Complex64)> = vec![(Monomial::ONE, *c)];
            for j in 0..self.j {
                let (k, l) = (m.k[j] as usize, m.l[j] as usize);
                let w = binomial_mix(k, l);
                let mut next = Vec::with_capacity(acc.len() * w.len());
                for (base, bc) in &acc {
                    for (b, wb) in w.iter().enumerate() {
                        if *wb == ZERO {
                            continue;
                        }
                        let mut mm = *base;
                        mm.k[j] = (k + l - b) as u8;
                        mm.l[j] = b as u8;
                        next.push((mm, bc * wb));
                    }
                }
                acc = next;
            }
            for (mm, v) in acc {
                *out.entry(mm).or_insert(ZERO) += v;
            }
        }
        Self {
            j: self.j,
            cutoff: self.cutoff,
            coeffs: out,
        }
    }

    /// Largest coefficient modulus (0 for the zero series).
    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// One line per stored monomial: `k-tuple | l-tuple | re | im`.
    pub fn dump(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.coeffs {
            let _ = writeln!(
                s,
                "{} | {} | {:.16e} | {:.16e}",
                m.k_tuple(self.j),
                m.l_tuple(self.j),
                c.re,
                c.im
            );
        }
        s
    }
}

/// Coefficients `w_b` of `y^b` in `(x − iy)^k (x + iy)^l`, `b = 0..=k+l`.
fn binomial_mix(k: usize, l: usize) -> Vec<Complex64> {
    let ipow = |e: usize, sign: f64| -> Complex64 {
        match e % 4 {
            0 => ONE,
            1 => Complex64::new(0.0, sign),
            2 => -ONE,
            _ => Complex64::new(0.0, -sign),
        }
    };
    let mut w = vec![ZERO; k + l + 1];
    for r in 0..=k {
        for s in 0..=l {
            let c = binomial(k, r) * binomial(l, s);
            w[r + s] += ipow(r, -1.0) * ipow(s, 1.0) * c;
        }
    }
    w
}

pub(crate) fn binomial(n: usize, r: usize) -> f64 {
    (0..r).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}
