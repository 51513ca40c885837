//! Prime generation and the classical arithmetic functions built on it:
//! segmented sieve, pi(x), Li(x), von Mangoldt Lambda, Moebius mu.

use crate::quad;
use rayon::prelude::*;
use std::sync::OnceLock;

/// Numbers per segment. Cache-resident segments dominate sieve throughput.
pub const DEFAULT_SEGMENT_SIZE: u64 = 1 << 20;

fn isqrt(n: u64) -> u64 {
    if n < 2 {
        return n;
    }
    let mut x = (n as f64).sqrt() as u64 + 1;
    while x * x > n {
        x -= 1;
    }
    x
}

/// Plain odd-only sieve of Eratosthenes; returns all primes <= n.
fn simple_sieve(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let mut primes = vec![2u64];
    if n < 3 {
        return primes;
    }
    // index i represents the odd number 2i + 3
    let m = ((n - 3) / 2 + 1) as usize;
    let mut composite = vec![false; m];
    for i in 0..m {
        if composite[i] {
            continue;
        }
        let p = 2 * i as u64 + 3;
        primes.push(p);
        let mut j = (p * p - 3) / 2;
        while (j as usize) < m {
            composite[j as usize] = true;
            j += p;
        }
    }
    primes
}

/// Sieves the odd numbers in [seg_lo, seg_hi] (inclusive) against `base`,
/// appending primes to `out` in increasing order. `base` must contain all
/// primes <= sqrt(seg_hi); the prime 2 is the caller's business.
fn sieve_segment(base: &[u64], seg_lo: u64, seg_hi: u64, out: &mut Vec<u64>) {
    debug_assert!(seg_lo <= seg_hi);
    let first_odd = if seg_lo <= 3 { 3 } else { seg_lo | 1 };
    if first_odd > seg_hi {
        return;
    }
    let len = ((seg_hi - first_odd) / 2 + 1) as usize;
    let mut composite = vec![false; len];
    for &p in base.iter().skip(1) {
        if p * p > seg_hi {
            break;
        }
        let mut start = p * p;
        if start < first_odd {
            start = first_odd.div_ceil(p) * p;
            if start % 2 == 0 {
                start += p;
            }
        }
        let mut idx = (start - first_odd) / 2;
        while (idx as usize) < len {
            composite[idx as usize] = true;
            idx += p;
        }
    }
    for (i, &c) in composite.iter().enumerate() {
        if !c {
            out.push(first_odd + 2 * i as u64);
        }
    }
}

/// Segmented prime iterator over [lo, hi], strictly increasing.
pub struct PrimeRangeIterator {
    hi: u64,
    segment_size: u64,
    base: Vec<u64>,
    buf: Vec<u64>,
    buf_pos: usize,
    next_segment: u64,
}

impl PrimeRangeIterator {
    pub fn new(lo: u64, hi: u64) -> Self {
        Self::with_segment_size(lo, hi, DEFAULT_SEGMENT_SIZE)
    }

    pub fn with_segment_size(lo: u64, hi: u64, segment_size: u64) -> Self {
        assert!(segment_size >= 2, "segment size must be at least 2");
        let base = if hi >= 9 { simple_sieve(isqrt(hi)) } else { vec![2] };
        let lo = lo.max(2);
        let mut it = PrimeRangeIterator {
            hi,
            segment_size,
            base,
            buf: Vec::new(),
            buf_pos: 0,
            next_segment: lo,
        };
        if lo <= 2 && hi >= 2 {
            it.buf.push(2);
        }
        it
    }
}

impl Iterator for PrimeRangeIterator {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.buf_pos < self.buf.len() {
                let p = self.buf[self.buf_pos];
                self.buf_pos += 1;
                return Some(p);
            }
            if self.next_segment > self.hi {
                return None;
            }
            self.buf.clear();
            self.buf_pos = 0;
            let seg_lo = self.next_segment;
            let seg_hi = seg_lo
                .saturating_add(self.segment_size - 1)
                .min(self.hi);
            self.next_segment = seg_hi + 1;
            sieve_segment(&self.base, seg_lo, seg_hi, &mut self.buf);
        }
    }
}

/// All primes <= n, in increasing order.
pub fn primes_upto(n: u64) -> PrimeRangeIterator {
    assert!(n >= 2, "primes_upto needs n >= 2");
    PrimeRangeIterator::new(2, n)
}

/// Unbounded prime stream for open-ended generation.
pub struct PrimeStream {
    base: Vec<u64>,
    base_limit: u64,
    buf: Vec<u64>,
    buf_pos: usize,
    next_segment: u64,
    segment_size: u64,
}

impl PrimeStream {
    pub fn new() -> Self {
        PrimeStream {
            base: vec![2],
            base_limit: 2,
            buf: vec![2],
            buf_pos: 0,
            next_segment: 3,
            segment_size: DEFAULT_SEGMENT_SIZE,
        }
    }
}

impl Default for PrimeStream {
    fn default() -> Self {
        Self::new()
    }
}

impl Iterator for PrimeStream {
    type Item = u64;

    fn next(&mut self) -> Option<u64> {
        loop {
            if self.buf_pos < self.buf.len() {
                let p = self.buf[self.buf_pos];
                self.buf_pos += 1;
                return Some(p);
            }
            let seg_lo = self.next_segment;
            let seg_hi = seg_lo + self.segment_size - 1;
            self.next_segment = seg_hi + 1;
            let need = isqrt(seg_hi);
            if need > self.base_limit {
                self.base = simple_sieve(need.max(16));
                self.base_limit = need.max(16);
            }
            self.buf.clear();
            self.buf_pos = 0;
            sieve_segment(&self.base, seg_lo, seg_hi, &mut self.buf);
        }
    }
}

/// pi(n): the number of primes <= n. Segments are counted in parallel and
/// the per-segment counts summed, which is order-independent and exact.
pub fn prime_count(n: u64) -> u64 {
    if n < 2 {
        return 0;
    }
    let base = simple_sieve(isqrt(n));
    let mut segments = Vec::new();
    let mut lo = 3u64;
    while lo <= n {
        let hi = lo.saturating_add(DEFAULT_SEGMENT_SIZE - 1).min(n);
        segments.push((lo, hi));
        lo = hi + 1;
    }
    let odd_count: u64 = segments
        .par_iter()
        .map(|&(lo, hi)| {
            let mut buf = Vec::new();
            sieve_segment(&base, lo, hi, &mut buf);
            buf.len() as u64
        })
        .sum();
    odd_count + 1
}

/// Li(x) = integral from 2 to x of dt / log t, to absolute error 1e-6.
pub fn li(x: f64) -> f64 {
    assert!(x >= 2.0, "li is defined here for x >= 2");
    if x == 2.0 {
        return 0.0;
    }
    quad::integrate(|t| 1.0 / t.ln(), 2.0, x, 1e-9)
}

fn small_primes() -> &'static [u64] {
    static TABLE: OnceLock<Vec<u64>> = OnceLock::new();
    TABLE.get_or_init(|| simple_sieve(1 << 16))
}

/// Prime factorization of n as (prime, multiplicity) pairs in increasing
/// prime order. Trial division: the callers touch sparse, modest inputs.
pub fn factorize(n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1);
    let mut n = n;
    let mut out = Vec::new();
    for &p in small_primes() {
        if p * p > n {
            break;
        }
        if n % p == 0 {
            let mut k = 0;
            while n % p == 0 {
                n /= p;
                k += 1;
            }
            out.push((p, k));
        }
    }
    if n > 1 {
        // leftover cofactor: either prime, or has all factors > 2^16
        let mut d = (1u64 << 16) + 1;
        while d * d <= n {
            if n % d == 0 {
                let mut k = 0;
                while n % d == 0 {
                    n /= d;
                    k += 1;
                }
                out.push((d, k));
            }
            d += 2;
        }
        if n > 1 {
            out.push((n, 1));
        }
    }
    out
}

/// Von Mangoldt function: log p when n = p^k, 0 otherwise.
pub fn mangoldt(n: u64) -> f64 {
    if n < 2 {
        return 0.0;
    }
    let f = factorize(n);
    if f.len() == 1 {
        (f[0].0 as f64).ln()
    } else {
        0.0
    }
}

/// Moebius function in {-1, 0, 1}.
pub fn moebius(n: u64) -> i32 {
    assert!(n >= 1);
    if n == 1 {
        return 1;
    }
    let f = factorize(n);
    if f.iter().any(|&(_, k)| k > 1) {
        0
    } else if f.len() % 2 == 0 {
        1
    } else {
        -1
    }
}
