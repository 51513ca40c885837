//! Constructions of normal numbers from integer parts of power functions.
//!
//! The library builds the digit string obtained by concatenating base-q
//! expansions of `floor(f(n))` for n running over the integers or the
//! primes, and provides the analytic toolkit used to check its equidistribution:
//! block discrepancy statistics, digit-sum summatories, smoothed indicator
//! functions with explicit Fourier tails, and prime exponential sums with a
//! combinatorial bilinear decomposition.

pub mod certnum;
pub mod digitstream;
pub mod harmonic;
pub mod primes;
pub(crate) mod quad;
pub mod stats;

pub use certnum::{
    eval_floor_power, eval_frac_scaled, parse_exact, EvalError, ExactReal, ParseError, PolyError,
    PrecisionCertificate, PseudoPolynomial, Term, DEFAULT_MAX_BITS,
};
