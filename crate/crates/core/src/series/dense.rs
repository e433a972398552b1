//! Indexed series for tight loops.
//!
//! A [`Basis`] lists every monomial of degree `≤ N` in graded order (degree,
//! then lexicographic) and precomputes the index of every product that stays
//! within the cutoff. Because the order is graded, the basis for `N' < N` is
//! a prefix of the basis for `N`, so accumulations restricted to low degrees
//! visit the same terms in the same order at either cutoff.

use super::{Monomial, TruncatedSeries};
use crate::error::Result;
use crate::lfunction::MAX_J;
use num_complex::Complex64;
use std::collections::HashMap;
use std::sync::Arc;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[derive(Debug)]
pub struct Basis {
    j: usize,
    cutoff: usize,
    monos: Vec<Monomial>,
    degrees: Vec<usize>,
    /// `degree_end[d]` = number of monomials of degree `≤ d`.
    degree_end: Vec<usize>,
    index: HashMap<Monomial, usize>,
    products: Vec<Vec<u32>>,
}

impl Basis {
    pub fn new(j: usize, cutoff: usize) -> Arc<Self> {
        assert!((1..=MAX_J).contains(&j), "J out of range");
        let mut monos = Vec::new();
        let mut exps = vec![0usize; 2 * j];
        enumerate(&mut exps, 0, cutoff, &mut |e| {
            monos.push(Monomial::new(&e[..j], &e[j..]));
        });
        monos.sort_by_key(Monomial::graded_key);
        let degrees: Vec<usize> = monos.iter().map(Monomial::degree).collect();
        let mut degree_end = vec![0; cutoff + 1];
        for d in 0..=cutoff {
            degree_end[d] = degrees.partition_point(|&x| x <= d);
        }
        let index: HashMap<Monomial, usize> =
            monos.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let products = monos
            .iter()
            .zip(&degrees)
            .map(|(a, &da)| {
                monos[..degree_end[cutoff - da]]
                    .iter()
                    .map(|b| index[&a.times(b)] as u32)
                    .collect()
            })
            .collect();
        Arc::new(Self {
            j,
            cutoff,
            monos,
            degrees,
            degree_end,
            index,
            products,
        })
    }

    pub fn j(&self) -> usize {
        self.j
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.monos.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monos.is_empty()
    }

    pub fn monomial(&self, i: usize) -> Monomial {
        self.monos[i]
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monos
    }

    pub fn degree(&self, i: usize) -> usize {
        self.degrees[i]
    }

    pub fn index_of(&self, m: &Monomial) -> Option<usize> {
        self.index.get(m).copied()
    }

    /// Number of monomials with degree `≤ d`.
    pub fn count_through(&self, d: usize) -> usize {
        self.degree_end[d.min(self.cutoff)]
    }

    /// `out += a · b`, truncated.
    pub fn mul_add(&self, a: &[Complex64], b: &[Complex64], out: &mut [Complex64]) {
        for (i, &ai) in a.iter().enumerate() {
            if ai == ZERO {
                continue;
            }
            for (&bj, &o) in b.iter().zip(&self.products[i]) {
                if bj != ZERO {
                    out[o as usize] += ai * bj;
                }
            }
        }
    }

    /// `log(1 + r)` for `r` without constant term, into `out` (overwritten).
    /// `work` and `power` are scratch buffers of basis length.
    pub fn log1p(
        &self,
        r: &[Complex64],
        out: &mut [Complex64],
        power: &mut Vec<Complex64>,
        work: &mut Vec<Complex64>,
    ) {
        debug_assert_eq!(r[0], ZERO);
        let n = self.len();
        let val = r
            .iter()
            .enumerate()
            .find(|(_, c)| **c != ZERO)
            .map(|(i, _)| self.degrees[i]);
        out.copy_from_slice(r);
        let Some(val) = val else { return };
        power.clear();
        power.extend_from_slice(r);
        work.resize(n, ZERO);
        for m in 2..=self.cutoff / val {
            work.iter_mut().for_each(|w| *w = ZERO);
            self.mul_add(power, r, work);
            std::mem::swap(power, work);
            let w = if m % 2 == 1 { 1.0 } else { -1.0 } / m as f64;
            for (o, p) in out.iter_mut().zip(power.iter()) {
                *o += p * w;
            }
        }
    }

    pub fn to_sparse(&self, c: &[Complex64]) -> Result<TruncatedSeries> {
        TruncatedSeries::from_terms(
            self.j,
            self.cutoff,
            self.monos
                .iter()
                .zip(c)
                .filter(|(_, v)| **v != ZERO)
                .map(|(m, v)| (*m, *v)),
        )
    }

    pub fn from_sparse(&self, s: &TruncatedSeries) -> Vec<Complex64> {
        let mut out = vec![ZERO; self.len()];
        for (m, c) in s.iter() {
            if let Some(i) = self.index_of(m) {
                out[i] = *c;
            }
        }
        out
    }
}

fn enumerate(e: &mut Vec<usize>, pos: usize, budget: usize, f: &mut impl FnMut(&[usize])) {
    if pos == e.len() {
        f(e);
        return;
    }
    for v in 0..=budget {
        e[pos] = v;
        enumerate(e, pos + 1, budget - v, f);
    }
    e[pos] = 0;
}
