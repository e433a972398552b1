#![allow(dead_code)]

use randeuler::rng::CounterRng;

/// Trial-division primality, independent of the library sieve.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Plain Eratosthenes over a byte array.
pub fn naive_sieve(limit: usize) -> Vec<u64> {
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for i in 2..=limit {
        if !composite[i] {
            out.push(i as u64);
            let mut m = i * i;
            while m <= limit {
                composite[m] = true;
                m += i;
            }
        }
    }
    out
}

/// Kahan summation.
pub fn kahan(xs: impl IntoIterator<Item = f64>) -> f64 {
    let (mut s, mut c) = (0.0f64, 0.0f64);
    for x in xs {
        let y = x - c;
        let t = s + y;
        c = (t - s) - y;
        s = t;
    }
    s
}

pub fn uniform(rng: &mut CounterRng, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * rng.next_f64()
}

/// `ψ(σ) = Σ_p Σ_m p^{-2mσ}/m²` over `p ≤ limit` for zeta, summed directly.
pub fn zeta_psi_direct(sigma: f64, limit: usize) -> f64 {
    kahan(naive_sieve(limit).into_iter().map(|p| {
        let w = (p as f64).powf(-2.0 * sigma);
        let mut acc = 0.0;
        let mut wm = 1.0;
        for m in 1..200 {
            wm *= w;
            let term = wm / (m * m) as f64;
            acc += term;
            if term < 1e-22 {
                break;
            }
        }
        acc
    }))
}
