//! Exact bilinear decomposition of prime-weighted exponential sums.
//!
//! For n in (P, P1] with V <= P the von Mangoldt function splits as
//! Lambda(n) = S1(n) - S2(n) + S4(n), where
//!   S1(n) = sum over dm = n, d <= U of mu(d) log m,
//!   S2(n) = sum over tm = n, t <= UV of c_t,  c_t = sum over dc = t,
//!           d <= U, c <= V of mu(d) Lambda(c),
//!   S4(n) = sum over hk = n, h > U, k > V of b_h Lambda(k),  b_h = sum
//!           over d | h, d > U of mu(d).
//! Summing e(phase(n)) against both sides and cutting every variable into
//! dyadic ranges turns the left side into a finite list of linear and
//! bilinear pieces whose recombination is exact, not asymptotic. That makes
//! the decomposition machine-checkable: the pieces must re-add to the
//! direct sum up to float rounding.

use super::{e, split_dyadic, HarmonicError};
use crate::primes::{mangoldt, moebius};
use num_complex::Complex64;
use num_integer::Roots;
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SumKind {
    /// Linear sum with log weight on the inner variable.
    TypeILog,
    /// Linear sum with unit inner weight.
    TypeI,
    /// Bilinear sum with von Mangoldt inner weights.
    TypeII,
}

/// One dyadic block of the decomposition: outer variable in (x, x1], inner
/// in (y, y1], subject to the global range P < xy <= P1.
#[derive(Debug, Clone)]
pub struct TypeSum {
    pub kind: SumKind,
    /// Sign of this piece in the recombination.
    pub sign: i8,
    pub x: f64,
    pub x1: f64,
    pub y: f64,
    pub y1: f64,
    pub value: Complex64,
    /// Number of (x, y) pairs with a nonzero contribution.
    pub terms: u64,
    /// Nonzero outer coefficients a_x inside (x, x1].
    pub outer_coeffs: Vec<(u64, f64)>,
    /// Nonzero inner weights inside (y, y1] for bilinear pieces.
    pub inner_coeffs: Option<Vec<(u64, f64)>>,
    pub outer_coeff_max: f64,
    pub inner_weight_max: f64,
}

#[derive(Debug, Clone)]
pub struct VaughanDecomposition {
    pub p: u64,
    pub p1: u64,
    pub u: u64,
    pub v: u64,
    /// True when no (U, V, Z) satisfies the bilinear-lemma constraint
    /// system at this scale, so the cuts are unconstrained choices.
    pub fallback_parameters: bool,
    pub components: Vec<TypeSum>,
    /// Signed sum of all component values.
    pub reconstructed: Complex64,
    /// components.len() / (ln P)^6, the observed count constant.
    pub count_constant: f64,
}

enum InnerWeight {
    One,
    Log,
    Lambda,
}

struct Family {
    kind: SumKind,
    sign: i8,
    outer_lo: f64,
    outer_hi: u64,
    inner_lo: f64,
    inner_hi: u64,
    coeffs: Vec<(u64, f64)>,
}

/// Smallest admissible parameter triple (U, V, Z) for the bilinear lemma:
/// 2 <= U < V <= Z <= P, U^2 <= Z, 128 U Z^2 <= P1, 2^18 P1 <= V^3.
/// Raising U only shrinks the admissible Z range, so U = 2 decides
/// feasibility.
pub fn lemma_range_parameters(p: u64, p1: u64) -> Option<(u64, u64, u64)> {
    let need = (p1 as u128) << 18;
    let mut vmin = need.cbrt();
    while vmin * vmin * vmin < need {
        vmin += 1;
    }
    let u = 2u128;
    let v = vmin.max(u + 1);
    let zlo = v.max(u * u);
    let zhi = (p1 as u128 / (128 * u)).sqrt().min(p as u128);
    if zlo > zhi {
        return None;
    }
    let (u, v, z) = (u as u64, v as u64, zlo as u64);
    debug_assert!(2 <= u && u < v && v <= z && z <= p);
    debug_assert!(u * u <= z);
    debug_assert!(128 * u as u128 * (z as u128).pow(2) <= p1 as u128);
    debug_assert!((v as u128).pow(3) >= (p1 as u128) << 18);
    Some((u, v, z))
}

/// Cut points used when the constraint system is empty at this scale:
/// U ~ P^(1/5), V ~ P^(1/3), clamped to stay admissible for the identity.
pub fn default_cut_parameters(p: u64) -> (u64, u64) {
    let u = p.nth_root(5).max(2);
    let v = p.cbrt().max(u + 1).min(p);
    (u, v)
}

/// Direct side of the identity: sum over P < n <= P1 of Lambda(n)
/// e(phase(n)), chunked in fixed order so threading cannot reorder it.
pub fn weighted_prime_sum(p: u64, p1: u64, phase: &(dyn Fn(u64) -> f64 + Sync)) -> Complex64 {
    let args: Vec<u64> = (p + 1..=p1).collect();
    let chunk_sums: Vec<Complex64> = args
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = Complex64::new(0.0, 0.0);
            for &n in chunk {
                let lam = mangoldt(n);
                if lam != 0.0 {
                    acc += lam * e(phase(n));
                }
            }
            acc
        })
        .collect();
    chunk_sums.iter().sum()
}

fn eval_component(
    coeffs: &[(u64, f64)],
    ylo: u64,
    yhi: u64,
    p: u64,
    p1: u64,
    weight: &InnerWeight,
    lam: &[f64],
    phase: &(dyn Fn(u64) -> f64 + Sync),
) -> (Complex64, u64, f64, f64) {
    let mut acc = Complex64::new(0.0, 0.0);
    let mut terms = 0u64;
    let mut amax = 0.0f64;
    let mut wmax = 0.0f64;
    for &(x, a) in coeffs {
        let lo = (p / x + 1).max(ylo + 1);
        let hi = (p1 / x).min(yhi);
        if lo > hi {
            continue;
        }
        let mut inner = Complex64::new(0.0, 0.0);
        let mut used = false;
        for y in lo..=hi {
            let w = match weight {
                InnerWeight::One => 1.0,
                InnerWeight::Log => (y as f64).ln(),
                InnerWeight::Lambda => lam[y as usize],
            };
            if w == 0.0 {
                continue;
            }
            inner += w * e(phase(x * y));
            terms += 1;
            used = true;
            wmax = wmax.max(w.abs());
        }
        if used {
            acc += a * inner;
            amax = amax.max(a.abs());
        }
    }
    (acc, terms, amax, wmax)
}

/// Splits sum over P < n <= P1 of Lambda(n) e(phase(n)) into dyadically
/// blocked pieces. Exactness of the recombination is the whole point, so
/// every integer pair is covered exactly once; nothing is dropped or
/// approximated beyond float rounding.
pub fn vaughan_decompose(
    p: u64,
    p1: u64,
    u: u64,
    v: u64,
    phase: &(dyn Fn(u64) -> f64 + Sync),
) -> Result<VaughanDecomposition, HarmonicError> {
    if !(3 <= p && p < p1 && p1 <= 2 * p) {
        return Err(HarmonicError::BadParameters(
            "need 3 <= P < P1 <= 2P".into(),
        ));
    }
    if !(2 <= u && u < v && v <= p) {
        return Err(HarmonicError::BadParameters(
            "need 2 <= U < V <= P".into(),
        ));
    }
    let fallback_parameters = lemma_range_parameters(p, p1).is_none();

    let kmax = p1 / (u + 1);
    let lam_hi = v.max(kmax);
    let lam: Vec<f64> = (0..=lam_hi)
        .map(|k| if k < 2 { 0.0 } else { mangoldt(k) })
        .collect();
    let mu: Vec<f64> = (0..=u).map(|d| if d == 0 { 0.0 } else { moebius(d) as f64 }).collect();

    // c_t = sum over dc = t, d <= U, c <= V of mu(d) Lambda(c), t <= UV
    let t_hi = (u * v).min(p1);
    let mut c_coeffs = vec![0.0f64; t_hi as usize + 1];
    for d in 1..=u {
        if mu[d as usize] == 0.0 {
            continue;
        }
        for c in 2..=v {
            let t = d * c;
            if t > t_hi {
                break;
            }
            if lam[c as usize] != 0.0 {
                c_coeffs[t as usize] += mu[d as usize] * lam[c as usize];
            }
        }
    }

    // b_h = sum over d | h, d > U of mu(d); equals -sum over d | h, d <= U
    // of mu(d) for h > 1, which a sieve over small d fills in
    let hmax = p1 / (v + 1);
    let mut b_coeffs = vec![0.0f64; hmax as usize + 1];
    for d in 1..=u.min(hmax) {
        if mu[d as usize] == 0.0 {
            continue;
        }
        let mut h = d;
        while h <= hmax {
            b_coeffs[h as usize] -= mu[d as usize];
            h += d;
        }
    }
    if hmax >= 1 {
        b_coeffs[1] += 1.0;
    }

    let nonzero = |table: &[f64], lo: u64| -> Vec<(u64, f64)> {
        table
            .iter()
            .enumerate()
            .skip(lo as usize)
            .filter(|(_, &a)| a != 0.0)
            .map(|(i, &a)| (i as u64, a))
            .collect()
    };

    let mut families = vec![
        Family {
            kind: SumKind::TypeILog,
            sign: 1,
            outer_lo: 0.5,
            outer_hi: u,
            inner_lo: 0.5,
            inner_hi: p1,
            coeffs: (1..=u)
                .filter(|&d| mu[d as usize] != 0.0)
                .map(|d| (d, mu[d as usize]))
                .collect(),
        },
        Family {
            kind: SumKind::TypeI,
            sign: -1,
            outer_lo: 0.5,
            outer_hi: t_hi,
            inner_lo: 0.5,
            inner_hi: p1,
            coeffs: nonzero(&c_coeffs, 1),
        },
        Family {
            kind: SumKind::TypeII,
            sign: 1,
            outer_lo: u as f64,
            outer_hi: hmax,
            inner_lo: v as f64,
            inner_hi: kmax,
            coeffs: nonzero(&b_coeffs, u + 1),
        },
    ];

    struct Job {
        kind: SumKind,
        sign: i8,
        xb: (f64, f64),
        yb: (f64, f64),
        coeffs: Vec<(u64, f64)>,
    }
    let mut jobs = Vec::new();
    for fam in families.drain(..) {
        if fam.coeffs.is_empty()
            || (fam.outer_hi as f64) <= fam.outer_lo
            || (fam.inner_hi as f64) <= fam.inner_lo
        {
            continue;
        }
        for xb in split_dyadic(fam.outer_lo, fam.outer_hi as f64) {
            let block: Vec<(u64, f64)> = fam
                .coeffs
                .iter()
                .filter(|&&(x, _)| (x as f64) > xb.0 && (x as f64) <= xb.1)
                .copied()
                .collect();
            if block.is_empty() {
                continue;
            }
            for yb in split_dyadic(fam.inner_lo, fam.inner_hi as f64) {
                jobs.push(Job {
                    kind: fam.kind,
                    sign: fam.sign,
                    xb,
                    yb,
                    coeffs: block.clone(),
                });
            }
        }
    }

    let components: Vec<TypeSum> = jobs
        .par_iter()
        .map(|job| {
            let ylo = job.yb.0.floor() as u64;
            let yhi = job.yb.1.floor() as u64;
            let (value, terms, amax, wmax) =
                eval_component(&job.coeffs, ylo, yhi, p, p1, weight_of(job.kind), &lam, phase);
            let inner_coeffs = match job.kind {
                SumKind::TypeII => Some(
                    (ylo + 1..=yhi)
                        .filter(|&k| lam[k as usize] != 0.0)
                        .map(|k| (k, lam[k as usize]))
                        .collect(),
                ),
                _ => None,
            };
            TypeSum {
                kind: job.kind,
                sign: job.sign,
                x: job.xb.0,
                x1: job.xb.1,
                y: job.yb.0,
                y1: job.yb.1,
                value,
                terms,
                outer_coeffs: job.coeffs.clone(),
                inner_coeffs,
                outer_coeff_max: amax,
                inner_weight_max: wmax,
            }
        })
        .collect();
    let components: Vec<TypeSum> = components.into_iter().filter(|c| c.terms > 0).collect();

    let mut reconstructed = Complex64::new(0.0, 0.0);
    for c in &components {
        reconstructed += c.sign as f64 * c.value;
    }
    let count_constant = components.len() as f64 / (p as f64).ln().powi(6);
    Ok(VaughanDecomposition {
        p,
        p1,
        u,
        v,
        fallback_parameters,
        components,
        reconstructed,
        count_constant,
    })
}

fn weight_of(kind: SumKind) -> &'static InnerWeight {
    match kind {
        SumKind::TypeILog => &InnerWeight::Log,
        SumKind::TypeI => &InnerWeight::One,
        SumKind::TypeII => &InnerWeight::Lambda,
    }
}
