//! Segmented sieve of Eratosthenes.

/// Segment length in odd numbers (one byte per odd number).
const SEGMENT: usize = 1 << 16;

/// Largest supported cutoff.
pub const MAX_CUTOFF: u64 = 1_000_000_000;

/// All primes `p <= limit` in ascending order.
///
/// The sieve runs over odd numbers only, in fixed-size segments, so memory
/// stays at `O(sqrt(limit) + SEGMENT)` besides the output.
pub fn primes_up_to(limit: u64) -> Vec<u64> {
    assert!(
        limit <= MAX_CUTOFF,
        "sieve cutoff {limit} above {MAX_CUTOFF}"
    );
    if limit < 2 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(estimate_count(limit));
    out.push(2);
    if limit < 3 {
        return out;
    }

    let root = isqrt(limit);
    let base = small_odd_primes(root);

    // Odd number n is stored at index (n - low) / 2 inside a segment whose
    // first odd number is `low`.
    let mut seg = vec![true; SEGMENT];
    let mut low = 3u64;
    while low <= limit {
        let high = (low + 2 * SEGMENT as u64 - 2).min(limit | 1);
        let len = ((high - low) / 2 + 1) as usize;
        seg[..len].iter_mut().for_each(|b| *b = true);
        for &p in &base {
            let p2 = p * p;
            if p2 > high {
                break;
            }
            let mut start = if p2 >= low {
                p2
            } else {
                let r = low.div_ceil(p) * p;
                if r % 2 == 0 {
                    r + p
                } else {
                    r
                }
            };
            while start <= high {
                seg[((start - low) / 2) as usize] = false;
                start += 2 * p;
            }
        }
        for (i, &is_prime) in seg[..len].iter().enumerate() {
            let n = low + 2 * i as u64;
            if is_prime && n <= limit {
                out.push(n);
            }
        }
        low = high + 2;
    }
    out
}

/// Number of primes up to `limit`.
pub fn prime_count(limit: u64) -> usize {
    primes_up_to(limit).len()
}

fn small_odd_primes(limit: u64) -> Vec<u64> {
    let n = limit as usize;
    let mut is = vec![true; n + 1];
    let mut out = Vec::new();
    let mut i = 3;
    while i <= n {
        if is[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                is[j] = false;
                j += 2 * i;
            }
        }
        i += 2;
    }
    out
}

pub(crate) fn isqrt(n: u64) -> u64 {
    let mut r = (n as f64).sqrt() as u64;
    while r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r
}

fn estimate_count(limit: u64) -> usize {
    let x = limit as f64;
    (1.26 * x / x.ln().max(1.0)) as usize + 16
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cases() {
        assert_eq!(primes_up_to(10), vec![2, 3, 5, 7]);
        assert!(primes_up_to(1).is_empty());
        assert!(primes_up_to(0).is_empty());
        assert_eq!(primes_up_to(2), vec![2]);
        assert_eq!(primes_up_to(3), vec![2, 3]);
        assert_eq!(primes_up_to(4), vec![2, 3]);
    }

    #[test]
    fn segment_boundaries() {
        // Cutoffs straddling segment edges must agree with trial division.
        let edge = 3 + 2 * SEGMENT as u64;
        for limit in [edge - 2, edge - 1, edge, edge + 1, 2 * edge + 7] {
            let ps = primes_up_to(limit);
            let brute: Vec<u64> = (2..=limit)
                .filter(|&n| (2..).take_while(|d| d * d <= n).all(|d| n % d != 0))
                .collect();
            assert_eq!(ps, brute, "limit {limit}");
        }
    }

    #[test]
    fn isqrt_exact() {
        for n in [0u64, 1, 3, 4, 15, 16, 17, 99_999_999, 100_000_000] {
            let r = isqrt(n);
            assert!(r * r <= n && (r + 1) * (r + 1) > n);
        }
    }
}
