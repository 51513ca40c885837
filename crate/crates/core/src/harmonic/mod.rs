//! Smoothed interval indicators with explicit Fourier data, exponential
//! sums over primes, digit-regime classification, exponent bookkeeping for
//! Vinogradov-type savings, and an oscillatory-integral diagnostic.

pub mod vaughan;

use crate::certnum::{eval_frac_scaled, EvalError, ExactReal, PseudoPolynomial};
use crate::digitstream::BlockPattern;
use crate::primes::primes_upto;
use crate::quad;
use num_bigint::BigUint;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive};
use rayon::prelude::*;
use std::f64::consts::PI;

pub use vaughan::{
    default_cut_parameters, lemma_range_parameters, vaughan_decompose, weighted_prime_sum,
    SumKind, TypeSum, VaughanDecomposition,
};

/// Primes per reduction chunk; chunk sums fold in order so the complex
/// result is independent of the thread count.
const SUM_CHUNK: usize = 4096;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HarmonicError {
    #[error("window (alpha={alpha}, beta={beta}, delta={delta}) violates the smoothing hypotheses")]
    BadWindow { alpha: f64, beta: f64, delta: f64 },
    #[error("invalid parameters: {0}")]
    BadParameters(String),
    #[error("digit position {j} exceeds the expansion range for N={n}")]
    OutOfRange { j: u32, n: u64 },
    #[error("oscillatory quadrature returned a non-finite value")]
    QuadratureFailure,
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// e(x) = exp(2 pi i x).
pub fn e(x: f64) -> Complex64 {
    Complex64::from_polar(1.0, 2.0 * PI * x)
}

/// One-periodic majorant/minorant of an interval indicator: the indicator
/// of [alpha, beta] convolved with a triangular kernel of base width delta.
///
/// The construction realizes the classical smoothing lemma: psi = 1 on
/// [alpha + delta/2, beta - delta/2], psi = 0 outside
/// [alpha - delta/2, beta + delta/2] (mod 1), 0 <= psi <= 1, and the
/// Fourier coefficients obey |A(nu)| <= min(beta - alpha, 1/|nu|,
/// 1/(nu^2 delta)) with constant one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoothedIndicator {
    pub alpha: f64,
    pub beta: f64,
    pub delta: f64,
    pub fourier_cutoff: u32,
}

/// Checks the smoothing hypotheses and builds the indicator.
pub fn build_smoothed_indicator(
    alpha: f64,
    beta: f64,
    delta: f64,
    fourier_cutoff: u32,
) -> Result<SmoothedIndicator, HarmonicError> {
    let width = beta - alpha;
    if !(delta > 0.0 && delta < 0.5 && delta <= width && width <= 1.0 - delta) {
        return Err(HarmonicError::BadWindow { alpha, beta, delta });
    }
    Ok(SmoothedIndicator {
        alpha,
        beta,
        delta,
        fourier_cutoff,
    })
}

/// Kernel CDF: mass of the triangular kernel left of z.
fn kernel_cdf(z: f64, delta: f64) -> f64 {
    let h = delta / 2.0;
    if z <= -h {
        0.0
    } else if z < 0.0 {
        let t = 1.0 + z / h;
        0.5 * t * t
    } else if z < h {
        let t = 1.0 - z / h;
        1.0 - 0.5 * t * t
    } else {
        1.0
    }
}

/// Closed-form psi(t): piecewise quadratic ramps around the window edges.
pub fn eval_psi(ind: &SmoothedIndicator, t: f64) -> f64 {
    let x = t - t.floor();
    let mut acc = 0.0;
    // the window plus kernel support spans less than one period, so only
    // the adjacent integer shifts can contribute
    for k in [-1.0f64, 0.0, 1.0] {
        acc += kernel_cdf(x - ind.alpha + k, ind.delta)
            - kernel_cdf(x - ind.beta + k, ind.delta);
    }
    acc.clamp(0.0, 1.0)
}

/// Fourier coefficient A(nu); A(0) is the mean beta - alpha.
pub fn fourier_coefficient(ind: &SmoothedIndicator, nu: i64) -> Complex64 {
    if nu == 0 {
        return Complex64::new(ind.beta - ind.alpha, 0.0);
    }
    let nuf = nu as f64;
    let box_part = (e(-nuf * ind.alpha) - e(-nuf * ind.beta)) / Complex64::new(0.0, 2.0 * PI * nuf);
    let arg = PI * nuf * ind.delta / 2.0;
    let kernel = (arg.sin() / arg).powi(2);
    box_part * kernel
}

/// Proven coefficient decay for this kernel, with constant one.
pub fn coefficient_bound(ind: &SmoothedIndicator, nu: i64) -> f64 {
    assert!(nu != 0);
    let nuf = nu.unsigned_abs() as f64;
    (ind.beta - ind.alpha)
        .min(1.0 / nuf)
        .min(1.0 / (nuf * nuf * ind.delta))
}

/// Rigorous bound on the Fourier tail past the cutoff, from the coefficient
/// envelope: harmonic-sum terms up to 1/delta, then the quadratic tail.
pub fn truncation_bound(ind: &SmoothedIndicator, cutoff: u32) -> f64 {
    assert!(cutoff >= 1);
    let k = cutoff as f64;
    let w = ind.beta - ind.alpha;
    let d = ind.delta;
    let tail = if (k + 1.0) * d >= 1.0 {
        // every discarded coefficient is already in the 1/(nu^2 delta) range
        1.0 / (k * d)
    } else {
        let m = (1.0 / d).ceil();
        (w * (m - k)).min((m / k).ln()) + 1.0 / (m * d)
    };
    2.0 * tail
}

/// Truncated Fourier evaluation plus the tail bound on the discarded part.
pub fn eval_psi_fourier(ind: &SmoothedIndicator, t: f64, cutoff: u32) -> (f64, f64) {
    let mut acc = ind.beta - ind.alpha;
    let step = e(t);
    let mut phase = Complex64::new(1.0, 0.0);
    for nu in 1..=cutoff as i64 {
        phase *= step;
        // A(-nu) = conj(A(nu)) since psi is real
        acc += 2.0 * (fourier_coefficient(ind, nu) * phase).re;
    }
    (acc, truncation_bound(ind, cutoff))
}

/// Which side of the sandwich an indicator realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowSign {
    Plus,
    Minus,
}

/// Smoothing windows for a digit block: the pattern occupies the base-q
/// interval [c, c + q^(-ell)) with c the pattern value; the minus window
/// shrinks it by (2H)^(-1) on each side and the plus window grows it, both
/// smoothed at scale 1/H.
pub fn indicator_for_block(
    pattern: &BlockPattern,
    h: f64,
    sign: WindowSign,
) -> Result<SmoothedIndicator, HarmonicError> {
    let ell = pattern.len() as u32;
    let qell = (pattern.base as f64).powi(ell as i32);
    if h <= 4.0 * qell {
        return Err(HarmonicError::BadWindow {
            alpha: 0.0,
            beta: 1.0 / qell,
            delta: 1.0 / h,
        });
    }
    let c = pattern.index() as f64 / qell;
    let half = 1.0 / (2.0 * h);
    let (alpha, beta) = match sign {
        WindowSign::Minus => (c + half, c + 1.0 / qell - half),
        WindowSign::Plus => (c - half, c + 1.0 / qell + half),
    };
    build_smoothed_indicator(alpha, beta, 1.0 / h, 1000)
}

/// Sharp block indicator: 1 when the fractional part of t falls in the
/// pattern's base-q interval. Single divisions keep the comparisons exact
/// at representable boundaries.
pub fn block_indicator(pattern: &BlockPattern, t: f64) -> f64 {
    let ell = pattern.len() as u32;
    let qell = (pattern.base as f64).powi(ell as i32);
    let lo = pattern.index() as f64 / qell;
    let hi = (pattern.index() + 1) as f64 / qell;
    let x = t - t.floor();
    if lo <= x && x < hi {
        1.0
    } else {
        0.0
    }
}

/// One evaluated exponential sum over primes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpSumSample {
    pub n: u64,
    pub j: u32,
    pub nu: i64,
    pub value: Complex64,
    /// Worst-case drift of `value` from the infinite-precision sum.
    pub phase_error: f64,
    /// |value| / pi(N).
    pub normalized_magnitude: f64,
    pub prime_count: u64,
}

/// S(N, j, nu) = sum over p <= N of e(nu q^(-j) f(p)), each phase certified
/// to tol / pi(N) so the sum-level error stays below ~2 pi tol.
pub fn exp_sum_primes(
    f: &PseudoPolynomial,
    q: u32,
    n: u64,
    j: u32,
    nu: i64,
    tol: f64,
    max_bits: u32,
) -> Result<ExpSumSample, HarmonicError> {
    if nu == 0 {
        return Err(HarmonicError::BadParameters("nu must be nonzero".into()));
    }
    assert!(n >= 2);
    let primes: Vec<u64> = primes_upto(n).collect();
    let pi = primes.len() as u64;
    let per_term = tol / pi as f64;
    let chunk_sums: Vec<Complex64> = primes
        .par_chunks(SUM_CHUNK)
        .map(|chunk| -> Result<Complex64, EvalError> {
            let mut acc = Complex64::new(0.0, 0.0);
            for &p in chunk {
                let (phase, _) = eval_frac_scaled(f, p, nu, q, j, per_term, max_bits)?;
                acc += e(phase);
            }
            Ok(acc)
        })
        .collect::<Result<_, _>>()?;
    let value: Complex64 = chunk_sums.iter().sum();
    let phase_error = 2.0 * PI * tol + pi as f64 * 1e-14;
    Ok(ExpSumSample {
        n,
        j,
        nu,
        value,
        phase_error,
        normalized_magnitude: value.norm() / pi as f64,
        prime_count: pi,
    })
}

/// Digit-position regimes: positions with q^j above N^(theta - 1 + rho)
/// carry the most significant digits, the rest the least significant ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    MostSignificant,
    LeastSignificant,
}

/// Exact regime test via integer power comparison; no rounding is involved.
pub fn classify_regime(
    q: u32,
    j: u32,
    n: u64,
    theta: &ExactReal,
    rho: &ExactReal,
) -> Result<Regime, HarmonicError> {
    assert!(q >= 2 && n >= 2);
    if !theta.is_positive() || !rho.is_positive() {
        return Err(HarmonicError::BadParameters(
            "theta and rho must be positive".into(),
        ));
    }
    let a = theta.numer().to_u32().unwrap();
    let b = theta.denom().to_u32().unwrap();
    // range check: q^j <= q N^theta, i.e. q^(jb) <= q^b N^a
    let lhs = BigUint::from(q).pow(j * b);
    let rhs = BigUint::from(q).pow(b) * BigUint::from(n).pow(a);
    if lhs > rhs {
        return Err(HarmonicError::OutOfRange { j, n });
    }
    // threshold exponent theta - 1 + rho = u / v
    let t = theta.as_ratio() - BigRational::one() + rho.as_ratio();
    if !t.is_positive() {
        return Err(HarmonicError::BadParameters(
            "theta - 1 + rho must be positive".into(),
        ));
    }
    let u = t.numer().to_u32().ok_or_else(|| {
        HarmonicError::BadParameters("threshold exponent numerator too large".into())
    })?;
    let v = t.denom().to_u32().ok_or_else(|| {
        HarmonicError::BadParameters("threshold exponent denominator too large".into())
    })?;
    // most significant iff q^j > N^(u/v), i.e. q^(jv) > N^u
    if BigUint::from(q).pow(j * v) > BigUint::from(n).pow(u) {
        Ok(Regime::MostSignificant)
    } else {
        Ok(Regime::LeastSignificant)
    }
}

/// Saving exponent eta and its intermediate counters.
#[derive(Debug, Clone, PartialEq)]
pub struct VinogradovExponents {
    pub rho: ExactReal,
    pub k: u32,
    pub r: u64,
    pub l: u64,
    pub eta: ExactReal,
}

/// R = 1 + floor(log((1/rho) k (k+1)^2) / -log(1 - 1/k)),
/// L = 1 + floor(k(k+1)/4 + kR), eta = rho / (16 (k+1) L).
/// The floor of the log ratio is taken in exact rational arithmetic: it is
/// the largest r with (k/(k-1))^r <= (1/rho) k (k+1)^2.
pub fn vinogradov_exponents(
    rho: &ExactReal,
    k: u32,
) -> Result<VinogradovExponents, HarmonicError> {
    if k < 2 {
        return Err(HarmonicError::BadParameters("k must be at least 2".into()));
    }
    let k_rat = BigRational::from_integer(k.into());
    if !rho.is_positive() || rho.as_ratio() > &k_rat {
        return Err(HarmonicError::BadParameters(
            "rho must lie in (0, k]".into(),
        ));
    }
    let bound = BigRational::from_integer((k as u64 * (k as u64 + 1).pow(2)).into())
        / rho.as_ratio();
    let ratio = BigRational::new(k.into(), (k - 1).into());
    let mut pow = BigRational::one();
    let mut steps = 0u64;
    while &pow * &ratio <= bound {
        pow *= &ratio;
        steps += 1;
    }
    let r = 1 + steps;
    let l = 1 + (k as u64 * (k as u64 + 1) + 4 * k as u64 * r) / 4;
    let eta = rho.as_ratio() / BigRational::from_integer((16 * (k as u64 + 1) * l).into());
    Ok(VinogradovExponents {
        rho: rho.clone(),
        k,
        r,
        l,
        eta: ExactReal::from(eta),
    })
}

/// Oscillatory integral of e(F) over [a, b] next to the stationary-phase
/// scaling: bound_ratio = |integral| * lambda^(1/k) for |F^(k)| >= lambda.
/// The comparison constant is not pinned down, so the ratio is a
/// diagnostic, not an assertion.
pub fn vdc_integral_check<F: Fn(f64) -> f64>(
    f: F,
    k: u32,
    lambda: f64,
    a: f64,
    b: f64,
) -> Result<(Complex64, f64), HarmonicError> {
    if k == 0 || lambda <= 0.0 || !(a <= b) {
        return Err(HarmonicError::BadParameters(
            "need k >= 1, lambda > 0, a <= b".into(),
        ));
    }
    let integral = quad::integrate_complex(|x| e(f(x)), a, b, 1e-10);
    if !integral.re.is_finite() || !integral.im.is_finite() {
        return Err(HarmonicError::QuadratureFailure);
    }
    let bound_ratio = integral.norm() * lambda.powf(1.0 / k as f64);
    Ok((integral, bound_ratio))
}

/// Disjoint dyadic cover of (a, b]: pieces (c, d] with d <= 2c.
pub fn split_dyadic(a: f64, b: f64) -> Vec<(f64, f64)> {
    assert!(a >= 0.5 && a < b, "need 1/2 <= a < b");
    let mut out = Vec::new();
    let mut c = a;
    while 2.0 * c < b {
        out.push((c, 2.0 * c));
        c *= 2.0;
    }
    out.push((c, b));
    out
}
