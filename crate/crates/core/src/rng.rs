//! Counter-based random streams.
//!
//! Every draw is addressed by `(seed, stream, position)`: the ChaCha8 key is
//! derived from the seed, the 64-bit nonce is the stream id (a sample index)
//! and the block counter is the position (a prime index). Workers can
//! therefore generate any sample independently and reproducibly.

use num_complex::Complex64;
use rand_chacha::rand_core::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::TAU;
use std::sync::OnceLock;

const TABLE_BITS: u32 = 16;
const TABLE_SIZE: usize = 1 << TABLE_BITS;

fn circle_table() -> &'static [Complex64] {
    static TABLE: OnceLock<Vec<Complex64>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..TABLE_SIZE)
            .map(|i| Complex64::from_polar(1.0, TAU * i as f64 / TABLE_SIZE as f64))
            .collect()
    })
}

/// Maps 64 random bits to `e^{iφ}` with `φ = 2π·bits/2^64`.
///
/// The top 16 bits pick a table entry and the remaining 48 bits a residual
/// angle below `2π/2^16 ≈ 9.6e-5`, whose rotation is taken from its Taylor
/// polynomial (truncation error below `1e-17`).
#[inline]
pub fn unit_circle_from_bits(bits: u64) -> Complex64 {
    let table = circle_table();
    let idx = (bits >> (64 - TABLE_BITS)) as usize;
    let rest = bits & ((1u64 << (64 - TABLE_BITS)) - 1);
    let d = rest as f64 * (TAU / 18_446_744_073_709_551_616.0);
    let d2 = d * d;
    let rot = Complex64::new(1.0 - 0.5 * d2 * (1.0 - d2 / 12.0), d * (1.0 - d2 / 6.0));
    table[idx] * rot
}

/// 53-bit uniform on `[0, 1)`.
#[inline]
pub fn unit_f64_from_bits(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// A keyed stream positioned at the start of `stream`.
#[derive(Clone)]
pub struct CounterRng {
    rng: ChaCha8Rng,
}

impl CounterRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { rng }
    }

    /// Repositions so that the next `next_u64` is draw number `index`.
    pub fn seek(&mut self, index: u64) {
        self.rng.set_word_pos(2 * index as u128);
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        unit_f64_from_bits(self.next_u64())
    }

    /// A uniform point on the unit circle.
    #[inline]
    pub fn unit_circle(&mut self) -> Complex64 {
        unit_circle_from_bits(self.next_u64())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_addressable() {
        let mut a = CounterRng::new(7, 3);
        let seq: Vec<u64> = (0..10).map(|_| a.next_u64()).collect();
        let mut b = CounterRng::new(7, 3);
        b.seek(6);
        assert_eq!(b.next_u64(), seq[6]);
        let mut c = CounterRng::new(7, 4);
        assert_ne!(c.next_u64(), seq[0]);
        let mut d = CounterRng::new(8, 3);
        assert_ne!(d.next_u64(), seq[0]);
    }

    #[test]
    fn circle_map_is_accurate() {
        for bits in [
            0u64,
            1,
            12_345_678_901_234_567,
            u64::MAX,
            1 << 63,
            0x0000_ffff_ffff_ffff,
        ] {
            let phi = bits as f64 / 18_446_744_073_709_551_616.0 * TAU;
            let expect = Complex64::from_polar(1.0, phi);
            assert!(
                (unit_circle_from_bits(bits) - expect).norm() < 4e-16,
                "{bits}"
            );
        }
    }

    #[test]
    fn circle_moments() {
        let mut r = CounterRng::new(1, 0);
        let n = 200_000;
        let mut s1 = Complex64::new(0.0, 0.0);
        let mut s2 = Complex64::new(0.0, 0.0);
        for _ in 0..n {
            let x = r.unit_circle();
            s1 += x;
            s2 += x * x;
        }
        assert!((s1 / n as f64).norm() < 0.01);
        assert!((s2 / n as f64).norm() < 0.01);
    }
}
