//! Distribution statistics: block discrepancy of stream prefixes,
//! q-additive summatory functions over primes with their main terms, and
//! robust fitting of the 1/log L decay trend.

use crate::certnum::{eval_floor_power, EvalError, PseudoPolynomial};
use crate::digitstream::{BlockCounter, BlockPattern, DigitError, DigitStream};
use crate::primes::{prime_count, primes_upto};
use num_bigint::BigUint;
use rayon::prelude::*;
use std::fmt;

/// Primes per reduction chunk. Chunk sums are folded in order, so floating
/// point results do not depend on the thread count.
const SUM_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StatsError {
    /// A q-additive function needs one weight per digit.
    WeightCount { expected: usize, got: usize },
    /// Strict q-additivity forces w(0) = 0.
    ZeroWeightNonzero,
    /// Decay fitting is undefined when some sample has R = 0.
    DegenerateSamples,
}

impl fmt::Display for StatsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatsError::WeightCount { expected, got } => {
                write!(f, "expected {expected} digit weights, got {got}")
            }
            StatsError::ZeroWeightNonzero => write!(f, "weight of digit 0 must be 0"),
            StatsError::DegenerateSamples => write!(f, "a sample has zero discrepancy"),
        }
    }
}

impl std::error::Error for StatsError {}

/// Completely q-additive function given by digit weights: g(n) is the sum
/// of w(d) over the base-q digits d of n.
#[derive(Debug, Clone, PartialEq)]
pub struct QAdditiveFunction {
    base: u32,
    weights: Vec<f64>,
}

impl QAdditiveFunction {
    pub fn new(base: u32, weights: Vec<f64>) -> Result<Self, StatsError> {
        if weights.len() != base as usize {
            return Err(StatsError::WeightCount {
                expected: base as usize,
                got: weights.len(),
            });
        }
        if weights[0] != 0.0 {
            return Err(StatsError::ZeroWeightNonzero);
        }
        Ok(QAdditiveFunction { base, weights })
    }

    /// The digit-sum function s_q.
    pub fn digit_sum(base: u32) -> Self {
        QAdditiveFunction {
            base,
            weights: (0..base).map(f64::from).collect(),
        }
    }

    pub fn base(&self) -> u32 {
        self.base
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn eval(&self, n: &BigUint) -> f64 {
        n.to_radix_be(self.base)
            .iter()
            .map(|&d| self.weights[d as usize])
            .sum()
    }

    /// Mean weight over one digit position.
    pub fn mean_digit_value(&self) -> f64 {
        self.weights.iter().sum::<f64>() / self.base as f64
    }
}

/// Sum of base-q digits of n.
pub fn digit_sum(n: &BigUint, q: u32) -> u64 {
    assert!(q >= 2);
    n.to_radix_be(q).iter().map(|&d| d as u64).sum()
}

/// Worst block-frequency deviation over all q^ell patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscrepancyReport {
    /// Digits inspected (the frequency denominator).
    pub digits_used: u64,
    pub ell: u32,
    pub sup_deviation: f64,
    /// Lowest-index pattern attaining the supremum.
    pub argmax_pattern: BlockPattern,
    /// count / digits_used for every pattern, in index order.
    pub per_pattern_freqs: Vec<f64>,
}

fn pattern_from_index(base: u32, ell: u32, index: u64) -> BlockPattern {
    let mut digits = vec![0u8; ell as usize];
    let mut v = index;
    for slot in digits.iter_mut().rev() {
        *slot = (v % base as u64) as u8;
        v /= base as u64;
    }
    BlockPattern::new(base, digits).expect("index is within the table")
}

/// Discrepancy over the first `l` digits of the stream.
pub fn discrepancy_prefix(
    stream: &DigitStream,
    l: usize,
    ell: u32,
) -> Result<DiscrepancyReport, DigitError> {
    assert!(l <= stream.len(), "prefix exceeds materialized digits");
    assert!(l >= ell as usize, "need at least ell digits");
    let counter = BlockCounter::count_all(stream.base, ell, &stream.digits[..l])?;
    Ok(report_from_counter(&counter))
}

/// Discrepancy of the whole materialized prefix.
pub fn discrepancy(stream: &DigitStream, ell: u32) -> Result<DiscrepancyReport, DigitError> {
    discrepancy_prefix(stream, stream.len(), ell)
}

/// Builds the report from an already-filled counter; frequencies use the
/// digit count as denominator, matching the R definition.
pub fn report_from_counter(counter: &BlockCounter) -> DiscrepancyReport {
    let l = counter.digits_seen();
    let q = counter.base();
    let ell = counter.ell();
    let target = (q as f64).powi(-(ell as i32));
    let mut sup = 0.0f64;
    let mut arg = 0u64;
    let mut freqs = Vec::with_capacity(counter.counts().len());
    for (i, &c) in counter.counts().iter().enumerate() {
        let freq = c as f64 / l as f64;
        let dev = (freq - target).abs();
        if dev > sup {
            sup = dev;
            arg = i as u64;
        }
        freqs.push(freq);
    }
    DiscrepancyReport {
        digits_used: l,
        ell,
        sup_deviation: sup,
        argmax_pattern: pattern_from_index(q, ell, arg),
        per_pattern_freqs: freqs,
    }
}

/// Summed g(floor(f(p))) over primes, next to the predicted main term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SummatoryReport {
    pub empirical: f64,
    /// mu_g * pi(N) * log_q(N^theta), theta the leading exponent.
    pub main_term: f64,
    /// (empirical - main_term) / pi(N); bounded for the digit-sum case.
    pub residual_per_prime: f64,
    pub prime_count: u64,
}

/// Sums g(floor(f(p))) over p <= n and compares with the main term.
pub fn summatory_over_primes(
    g: &QAdditiveFunction,
    f: &PseudoPolynomial,
    n: u64,
    max_bits: u32,
) -> Result<SummatoryReport, EvalError> {
    assert!(n >= 2);
    let primes: Vec<u64> = primes_upto(n).collect();
    let chunk_sums: Vec<f64> = primes
        .par_chunks(SUM_CHUNK)
        .map(|chunk| -> Result<f64, EvalError> {
            let mut acc = 0.0;
            for &p in chunk {
                let (v, _) = eval_floor_power(f, p, max_bits)?;
                acc += g.eval(&v);
            }
            Ok(acc)
        })
        .collect::<Result<_, _>>()?;
    let empirical: f64 = chunk_sums.iter().sum();
    let pi = primes.len() as u64;
    let theta = f.leading_exponent().to_f64();
    let main_term =
        g.mean_digit_value() * pi as f64 * theta * (n as f64).ln() / (g.base() as f64).ln();
    Ok(SummatoryReport {
        empirical,
        main_term,
        residual_per_prime: (empirical - main_term) / pi as f64,
        prime_count: pi,
    })
}

/// Expected count of one fixed length-ell block among the padded per-item
/// expansions: q^{-ell} * pi(N) * log_q(N^theta).
pub fn block_main_term(n: u64, theta: f64, q: u32, ell: u32) -> f64 {
    assert!(n >= 2);
    let pi = prime_count(n) as f64;
    (q as f64).powi(-(ell as i32)) * pi * theta * (n as f64).ln() / (q as f64).ln()
}

/// Fits C in R ~ C / log L and reports how tightly the samples follow the
/// trend: C is the median of R * ln L, band_ratio the max/min spread of the
/// same products.
pub fn fit_log_decay(samples: &[(u64, f64)]) -> Result<(f64, f64), StatsError> {
    assert!(samples.len() >= 3, "need at least three samples");
    for w in samples.windows(2) {
        assert!(w[0].0 < w[1].0, "sample sizes must strictly increase");
    }
    if samples.iter().any(|&(_, r)| r == 0.0) {
        return Err(StatsError::DegenerateSamples);
    }
    let mut products: Vec<f64> = samples
        .iter()
        .map(|&(l, r)| r * (l as f64).ln())
        .collect();
    products.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mid = products.len() / 2;
    let c = if products.len() % 2 == 1 {
        products[mid]
    } else {
        0.5 * (products[mid - 1] + products[mid])
    };
    let band_ratio = products[products.len() - 1] / products[0];
    Ok((c, band_ratio))
}
