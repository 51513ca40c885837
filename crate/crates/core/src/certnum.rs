//! Exact-input, certified-output evaluation of pseudo-polynomials.
//!
//! Coefficients and exponents are exact rationals, so `floor(f(n))` is a
//! well-defined integer and we can certify it: evaluate `f(n)` in dyadic
//! interval arithmetic at doubling precisions until the enclosure pins the
//! floor down, falling back to an exact perfect-power evaluation when a term
//! lands precisely on a rational.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

/// Evaluation errors for the certified arithmetic layer.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    #[error("floor of f({n}) not certified within {max_bits} bits")]
    AmbiguousFloor { n: u64, max_bits: u32 },
    #[error("fractional part at n={n} straddles a wrap point (width {interval_width:e} at {working_bits} bits)")]
    AmbiguousFrac {
        n: u64,
        working_bits: u32,
        interval_width: f64,
    },
    #[error("f({n}) is negative")]
    NegativeValue { n: u64 },
}

/// Parse errors for exact numeric literals.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ParseError {
    #[error("malformed exact number: {0:?}")]
    MalformedNumber(String),
}

/// Construction errors for [`PseudoPolynomial`].
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PolyError {
    #[error("pseudo-polynomial needs at least one term")]
    Empty,
    #[error("leading coefficient must be positive")]
    LeadingCoefficient,
    #[error("exponents must be positive and strictly decreasing")]
    ExponentOrder,
    #[error("exponent {0} outside supported range (numerator <= 64, denominator <= 64)")]
    UnsupportedExponent(String),
}

/// An exact rational number stored in lowest terms.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactReal(BigRational);

impl ExactReal {
    pub fn from_integer(v: i64) -> Self {
        ExactReal(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "denominator must be nonzero");
        ExactReal(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    /// Parses an exact decimal literal (`"1.5"`, `"-3"`, `"1e-3"`) or a
    /// ratio of two such literals (`"7/3"`, `"1.5/2"`). Ratio inputs are
    /// accepted because exponents like 7/3 have no finite decimal form.
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        let bad = || ParseError::MalformedNumber(text.to_string());
        if let Some((num, den)) = text.split_once('/') {
            let n = parse_decimal(num).ok_or_else(bad)?;
            let d = parse_decimal(den).ok_or_else(bad)?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(ExactReal(n / d));
        }
        parse_decimal(text).map(ExactReal).ok_or_else(bad)
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
}

impl From<BigRational> for ExactReal {
    fn from(r: BigRational) -> Self {
        ExactReal(r)
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

fn parse_decimal(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if text.is_empty() {
        return None;
    }
    let (mantissa, exp10) = match text.find(['e', 'E']) {
        Some(pos) => {
            let e: i64 = text[pos + 1..].parse().ok()?;
            (&text[..pos], e)
        }
        None => (text, 0i64),
    };
    let (sign, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((i, f)) => (i, f),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().all(|b| b.is_ascii_digit()) || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let joined = format!("{int_part}{frac_part}");
    let numer: BigInt = joined.parse().ok()?;
    let shift = exp10 - frac_part.len() as i64;
    let ten = BigInt::from(10);
    let value = if shift >= 0 {
        BigRational::from_integer(numer * ten.pow(shift as u32))
    } else {
        BigRational::new(numer, ten.pow((-shift) as u32))
    };
    Some(ExactReal::from(value * BigRational::from_integer(BigInt::from(sign))).0)
}

/// Parses an exact decimal or rational literal.
pub fn parse_exact(text: &str) -> Result<ExactReal, ParseError> {
    ExactReal::parse(text)
}

/// One `coefficient * x^exponent` term.
#[derive(Debug, Clone, PartialEq)]
pub struct Term {
    pub coefficient: ExactReal,
    pub exponent: ExactReal,
}

/// `f(x) = a_0 x^{t_0} + ... + a_d x^{t_d}` with exact rational coefficients
/// and positive, strictly decreasing rational exponents; the leading
/// coefficient is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoPolynomial {
    terms: Vec<Term>,
}

impl PseudoPolynomial {
    pub fn new(terms: Vec<(ExactReal, ExactReal)>) -> Result<Self, PolyError> {
        if terms.is_empty() {
            return Err(PolyError::Empty);
        }
        if !terms[0].0.is_positive() {
            return Err(PolyError::LeadingCoefficient);
        }
        for w in terms.windows(2) {
            if w[1].1 >= w[0].1 {
                return Err(PolyError::ExponentOrder);
            }
        }
        for (_, e) in &terms {
            if !e.is_positive() {
                return Err(PolyError::ExponentOrder);
            }
            let (p, r) = exponent_parts(e);
            if p > 64 || r > 64 {
                return Err(PolyError::UnsupportedExponent(e.to_string()));
            }
        }
        Ok(PseudoPolynomial {
            terms: terms
                .into_iter()
                .map(|(coefficient, exponent)| Term {
                    coefficient,
                    exponent,
                })
                .collect(),
        })
    }

    /// Single-term `alpha * x^theta`.
    pub fn power(alpha: ExactReal, theta: ExactReal) -> Result<Self, PolyError> {
        PseudoPolynomial::new(vec![(alpha, theta)])
    }

    /// The identity map `x`, the Champernowne / Copeland-Erdos choice.
    pub fn identity() -> Self {
        PseudoPolynomial::power(ExactReal::from_integer(1), ExactReal::from_integer(1)).unwrap()
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// Leading exponent; plays the role of theta for single power maps.
    pub fn leading_exponent(&self) -> &ExactReal {
        &self.terms[0].exponent
    }

    /// True when every exponent is a plain integer (classical polynomial).
    pub fn is_integral(&self) -> bool {
        self.terms.iter().all(|t| t.exponent.is_integer())
    }

    /// Exact value of f(n) when every term is rational, i.e. when each
    /// n^(p/r) is a perfect r-th power. Returns None otherwise.
    pub fn exact_value(&self, n: u64) -> Option<BigRational> {
        let mut acc = BigRational::zero();
        for term in &self.terms {
            let (p, r) = exponent_parts(&term.exponent);
            let base = BigUint::from(n).pow(p);
            let root = if r == 1 {
                base
            } else {
                let root = base.nth_root(r);
                if root.pow(r) != base {
                    return None;
                }
                root
            };
            acc += term.coefficient.as_ratio() * BigRational::from_integer(BigInt::from(root));
        }
        Some(acc)
    }

    /// Canonical textual form, e.g. `1^3/2` or `2^2+1/2^1` (coeff^exp terms
    /// joined by '+'); used for config echoes and cache hashing.
    pub fn canonical_string(&self) -> String {
        self.terms
            .iter()
            .map(|t| format!("{}^{}", t.coefficient, t.exponent))
            .collect::<Vec<_>>()
            .join("+")
    }
}

impl fmt::Display for PseudoPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.canonical_string())
    }
}

/// (numerator, denominator) of a positive exponent as u32s.
fn exponent_parts(e: &ExactReal) -> (u32, u32) {
    let p = e.numer().to_u32().unwrap_or(u32::MAX);
    let r = e.denom().to_u32().unwrap_or(u32::MAX);
    (p, r)
}

/// Default top of the precision ladder.
pub const DEFAULT_MAX_BITS: u32 = 16384;
const FIRST_RUNG: u32 = 64;

/// Outcome record for one certified evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrecisionCertificate {
    /// Fractional bits of the dyadic working interval.
    pub working_bits: u32,
    /// Width of the final enclosure, as a real number.
    pub interval_width: f64,
    pub certified: bool,
    /// Ladder steps taken beyond the first rung.
    pub escalations: u32,
}

/// Dyadic enclosure: value lies in [lo, hi] / 2^scale.
#[derive(Debug, Clone)]
pub(crate) struct Enclosure {
    pub lo: BigInt,
    pub hi: BigInt,
    pub scale: u32,
}

impl Enclosure {
    pub fn width_f64(&self) -> f64 {
        big_to_f64_scaled(&(&self.hi - &self.lo), self.scale)
    }
}

fn big_to_f64_scaled(v: &BigInt, scale: u32) -> f64 {
    let ratio = BigRational::new(v.clone(), BigInt::one() << scale);
    ratio.to_f64().unwrap_or(f64::INFINITY)
}

/// Encloses f(n) at the given dyadic scale. Each term's root is bracketed by
/// an exact integer r-th root, then scaled by the rational coefficient with
/// outward rounding, so the true value always lies inside [lo, hi]/2^scale.
pub(crate) fn enclose(f: &PseudoPolynomial, n: u64, scale: u32) -> Enclosure {
    let mut lo = BigInt::zero();
    let mut hi = BigInt::zero();
    for term in f.terms() {
        let (p, r) = exponent_parts(&term.exponent);
        let base = BigUint::from(n).pow(p);
        let (t_lo, t_hi) = if r == 1 {
            let v = BigInt::from(base) << scale;
            (v.clone(), v)
        } else {
            let shifted = base << (r as usize * scale as usize);
            let root = shifted.nth_root(r);
            if root.pow(r) == shifted {
                let v = BigInt::from(root);
                (v.clone(), v)
            } else {
                let lo = BigInt::from(root);
                (lo.clone(), lo + 1)
            }
        };
        let a = term.coefficient.numer();
        let b = term.coefficient.denom();
        let (c_lo, c_hi) = if a.sign() != Sign::Minus {
            ((a * &t_lo).div_floor(b), (a * &t_hi).div_ceil(b))
        } else {
            ((a * &t_hi).div_floor(b), (a * &t_lo).div_ceil(b))
        };
        lo += c_lo;
        hi += c_hi;
    }
    Enclosure { lo, hi, scale }
}

fn ladder(max_bits: u32) -> impl Iterator<Item = u32> {
    std::iter::successors(Some(FIRST_RUNG.min(max_bits)), move |&s| {
        if s >= max_bits {
            None
        } else {
            Some((s * 2).min(max_bits))
        }
    })
}

/// Certified `floor(f(n))`.
///
/// Walks the doubling precision ladder until the enclosure determines the
/// floor with honest margin (enclosure width smaller than the midpoint's
/// distance to the nearest integer it excludes). After the first failed rung
/// an exact perfect-power evaluation resolves values that are genuinely
/// rational, e.g. `4^{3/2} = 8`.
pub fn eval_floor_power(
    f: &PseudoPolynomial,
    n: u64,
    max_bits: u32,
) -> Result<(BigUint, PrecisionCertificate), EvalError> {
    let mut escalations = 0u32;
    let mut tried_exact = false;
    for scale in ladder(max_bits) {
        let enc = enclose(f, n, scale);
        if enc.hi.is_negative() {
            return Err(EvalError::NegativeValue { n });
        }
        let unit = BigInt::one() << scale;
        let fl = enc.lo.div_floor(&unit);
        let fh = enc.hi.div_floor(&unit);
        if fl == fh && floor_margin_ok(&enc, &fl) {
            if fl.is_negative() {
                return Err(EvalError::NegativeValue { n });
            }
            let cert = PrecisionCertificate {
                working_bits: scale,
                interval_width: enc.width_f64(),
                certified: true,
                escalations,
            };
            return Ok((fl.to_biguint().unwrap(), cert));
        }
        if !tried_exact {
            tried_exact = true;
            if let Some(v) = f.exact_value(n) {
                if v.is_negative() {
                    return Err(EvalError::NegativeValue { n });
                }
                let cert = PrecisionCertificate {
                    working_bits: scale,
                    interval_width: 0.0,
                    certified: true,
                    escalations,
                };
                return Ok((v.floor().numer().to_biguint().unwrap(), cert));
            }
        }
        escalations += 1;
    }
    Err(EvalError::AmbiguousFloor { n, max_bits })
}

/// width < distance from the enclosure midpoint to the nearest excluded
/// integer (the floor window is [fl, fl+1), so the nearest excluded integers
/// are fl+1 above and fl-1 below). Exact big-integer comparison.
fn floor_margin_ok(enc: &Enclosure, fl: &BigInt) -> bool {
    let unit = BigInt::one() << enc.scale;
    let width2 = (&enc.hi - &enc.lo) << 1u32;
    let mid2 = &enc.lo + &enc.hi;
    let upper2 = (fl + 1) * &unit << 1u32;
    let lower2 = (fl - 1) * &unit << 1u32;
    width2 < &upper2 - &mid2 && width2 < &mid2 - &lower2
}

/// Certified fractional part of `nu * q^{-j} * f(n)`.
///
/// Returns a value within `tol` of the true fractional part. Escalates like
/// [`eval_floor_power`]; a persistent straddle of a wrap point (the value is
/// within tol of an integer from both sides) reports `AmbiguousFrac`.
pub fn eval_frac_scaled(
    f: &PseudoPolynomial,
    n: u64,
    nu: i64,
    q: u32,
    j: u32,
    tol: f64,
    max_bits: u32,
) -> Result<(f64, PrecisionCertificate), EvalError> {
    assert!(nu != 0, "nu must be nonzero");
    assert!(q >= 2, "base must be at least 2");
    assert!(tol > 0.0 && tol < 0.25, "tol must lie in (0, 1/4)");
    let a = BigInt::from(nu);
    let b = BigInt::from(BigUint::from(q).pow(j));
    let mut escalations = 0u32;
    let mut tried_exact = false;
    let mut last_width = f64::INFINITY;
    let mut last_scale = FIRST_RUNG;
    for scale in ladder(max_bits) {
        let enc = enclose(f, n, scale);
        let (lo, hi) = if a.sign() != Sign::Minus {
            ((&a * &enc.lo).div_floor(&b), (&a * &enc.hi).div_ceil(&b))
        } else {
            ((&a * &enc.hi).div_floor(&b), (&a * &enc.lo).div_ceil(&b))
        };
        let unit = BigInt::one() << scale;
        let width = &hi - &lo;
        last_width = big_to_f64_scaled(&width, scale);
        last_scale = scale;
        if width_within(&width, scale, tol / 2.0) {
            let k_lo = lo.div_floor(&unit);
            let k_hi = hi.div_floor(&unit);
            if k_lo == k_hi {
                let frac2 = &lo + &hi - ((&k_lo * &unit) << 1u32);
                let value = big_to_f64_scaled(&frac2, scale + 1);
                let cert = PrecisionCertificate {
                    working_bits: scale,
                    interval_width: last_width,
                    certified: true,
                    escalations,
                };
                return Ok((value.clamp(0.0, 1.0 - f64::EPSILON), cert));
            }
            // Narrow but wrapping: only an exact hit on an integer survives
            // escalation, so try the rational route.
            if !tried_exact {
                tried_exact = true;
                if let Some(v) = exact_frac(f, n, &a, &b) {
                    let cert = PrecisionCertificate {
                        working_bits: scale,
                        interval_width: 0.0,
                        certified: true,
                        escalations,
                    };
                    return Ok((v, cert));
                }
            }
        } else if !tried_exact {
            tried_exact = true;
            if let Some(v) = exact_frac(f, n, &a, &b) {
                let cert = PrecisionCertificate {
                    working_bits: scale,
                    interval_width: 0.0,
                    certified: true,
                    escalations,
                };
                return Ok((v, cert));
            }
        }
        escalations += 1;
    }
    Err(EvalError::AmbiguousFrac {
        n,
        working_bits: last_scale,
        interval_width: last_width,
    })
}

fn exact_frac(f: &PseudoPolynomial, n: u64, a: &BigInt, b: &BigInt) -> Option<f64> {
    let v = f.exact_value(n)?;
    let scaled = v * BigRational::new(a.clone(), b.clone());
    let frac = &scaled - scaled.floor();
    frac.to_f64().map(|x| x.clamp(0.0, 1.0 - f64::EPSILON))
}

/// Exact comparison of a dyadic width against an f64 tolerance.
fn width_within(width: &BigInt, scale: u32, tol: f64) -> bool {
    if tol <= 0.0 {
        return false;
    }
    // tol = m * 2^e exactly (f64 is dyadic).
    let (m, e) = decompose_f64(tol);
    // width / 2^scale <= m * 2^e  <=>  width <= m * 2^(e + scale)
    let shift = e + scale as i64;
    if shift >= 0 {
        *width <= BigInt::from(m) << (shift as usize)
    } else {
        width << ((-shift) as usize) <= BigInt::from(m)
    }
}

fn decompose_f64(x: f64) -> (u64, i64) {
    assert!(x.is_finite() && x > 0.0);
    let bits = x.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(alpha: (i64, i64), theta: (i64, i64)) -> PseudoPolynomial {
        PseudoPolynomial::power(
            ExactReal::from_ratio(alpha.0, alpha.1),
            ExactReal::from_ratio(theta.0, theta.1),
        )
        .unwrap()
    }

    #[test]
    fn parse_decimal_literals() {
        assert_eq!(ExactReal::parse("1.5").unwrap(), ExactReal::from_ratio(3, 2));
        assert_eq!(ExactReal::parse("0.75").unwrap(), ExactReal::from_ratio(3, 4));
        assert_eq!(ExactReal::parse("1e-3").unwrap(), ExactReal::from_ratio(1, 1000));
        assert_eq!(ExactReal::parse("-2.5e2").unwrap(), ExactReal::from_integer(-250));
        assert_eq!(ExactReal::parse("7/3").unwrap(), ExactReal::from_ratio(7, 3));
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "abc", "1.2.3", "1e", "--3", "1/0", ".e3", "0x12"] {
            assert!(ExactReal::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn floor_integer_exponent_is_exact_at_first_rung() {
        let f = poly((1, 1), (2, 1));
        let (v, cert) = eval_floor_power(&f, 3, DEFAULT_MAX_BITS).unwrap();
        assert_eq!(v, BigUint::from(9u32));
        assert!(cert.certified);
        assert_eq!(cert.escalations, 0);
        assert_eq!(cert.working_bits, 64);
    }

    #[test]
    fn floor_three_halves() {
        let f = poly((1, 1), (3, 2));
        let (v, cert) = eval_floor_power(&f, 2, DEFAULT_MAX_BITS).unwrap();
        assert_eq!(v, BigUint::from(2u32)); // 2^1.5 = 2.828...
        assert!(cert.certified);
    }

    #[test]
    fn floor_perfect_power_boundary() {
        // 4^{3/2} = 8 exactly: interval alone cannot separate it from 8,
        // the exact perfect-power test must resolve it.
        let f = poly((1, 1), (3, 2));
        let (v, cert) = eval_floor_power(&f, 4, DEFAULT_MAX_BITS).unwrap();
        assert_eq!(v, BigUint::from(8u32));
        assert!(cert.certified);
        assert_eq!(cert.interval_width, 0.0);
    }

    #[test]
    fn floor_rational_coefficient_boundary() {
        // (3/2) * 4^{1/2} = 3 exactly.
        let f = poly((3, 2), (1, 2));
        let (v, _) = eval_floor_power(&f, 4, DEFAULT_MAX_BITS).unwrap();
        assert_eq!(v, BigUint::from(3u32));
    }

    #[test]
    fn negative_value_detected() {
        let f = PseudoPolynomial::new(vec![
            (ExactReal::from_integer(1), ExactReal::from_ratio(3, 2)),
            (ExactReal::from_integer(-10), ExactReal::from_integer(1)),
        ])
        .unwrap();
        assert!(matches!(
            eval_floor_power(&f, 2, DEFAULT_MAX_BITS),
            Err(EvalError::NegativeValue { n: 2 })
        ));
    }

    #[test]
    fn frac_simple_rational() {
        let f = PseudoPolynomial::identity();
        let (v, cert) = eval_frac_scaled(&f, 5, 1, 10, 1, 1e-12, DEFAULT_MAX_BITS).unwrap();
        assert!((v - 0.5).abs() <= 1e-12);
        assert!(cert.certified);
    }

    #[test]
    fn frac_irrational() {
        // {2^{3/2}} = 0.8284271...
        let f = poly((1, 1), (3, 2));
        let (v, _) = eval_frac_scaled(&f, 2, 1, 2, 0, 1e-12, DEFAULT_MAX_BITS).unwrap();
        assert!((v - (8f64.sqrt() - 2.0)).abs() < 1e-9);
    }

    #[test]
    fn frac_scaled_rational() {
        // 3 * 49 / 100 mod 1 = 0.47
        let f = poly((1, 1), (2, 1));
        let (v, _) = eval_frac_scaled(&f, 7, 3, 10, 2, 1e-12, DEFAULT_MAX_BITS).unwrap();
        assert!((v - 0.47).abs() <= 1e-12);
    }

    #[test]
    fn frac_exact_wrap_is_zero() {
        // nu * f(n) / q^j an exact integer: fractional part is exactly 0.
        let f = poly((1, 1), (1, 1));
        let (v, cert) = eval_frac_scaled(&f, 10, 3, 10, 1, 1e-9, DEFAULT_MAX_BITS).unwrap();
        assert_eq!(v, 0.0);
        assert!(cert.certified);
    }

    #[test]
    fn negative_nu_frac() {
        let f = PseudoPolynomial::identity();
        // {-5/10} = 0.5
        let (v, _) = eval_frac_scaled(&f, 5, -1, 10, 1, 1e-12, DEFAULT_MAX_BITS).unwrap();
        assert!((v - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn poly_validation() {
        assert!(PseudoPolynomial::new(vec![]).is_err());
        assert!(PseudoPolynomial::new(vec![(
            ExactReal::from_integer(-1),
            ExactReal::from_integer(2)
        )])
        .is_err());
        assert!(PseudoPolynomial::new(vec![
            (ExactReal::from_integer(1), ExactReal::from_integer(1)),
            (ExactReal::from_integer(1), ExactReal::from_integer(2)),
        ])
        .is_err());
    }

    #[test]
    fn canonical_string_roundtrip_shape() {
        let f = PseudoPolynomial::new(vec![
            (ExactReal::from_integer(2), ExactReal::from_ratio(5, 2)),
            (ExactReal::from_ratio(1, 2), ExactReal::from_integer(1)),
        ])
        .unwrap();
        assert_eq!(f.canonical_string(), "2^5/2+1/2^1");
    }

    #[test]
    fn certificate_honesty_on_samples() {
        let f = poly((1, 1), (3, 2));
        for n in [2u64, 3, 5, 17, 1000003] {
            let (v, cert) = eval_floor_power(&f, n, DEFAULT_MAX_BITS).unwrap();
            assert!(cert.certified);
            if cert.interval_width > 0.0 {
                // midpoint distance to fl+1 must exceed the width
                let fl = v.to_f64().unwrap();
                let x = (n as f64).powf(1.5);
                assert!(cert.interval_width < (fl + 1.0 - x).abs());
            }
        }
    }
}
