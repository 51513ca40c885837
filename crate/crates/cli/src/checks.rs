//! The verification suite behind `ndf check`: every row re-measures one of
//! the analytic guarantees (smoothing sandwich, Fourier coefficient and
//! truncation bounds, block windows, the bilinear prime-sum identity, the
//! exponent calculator, dyadic splitting, the oscillatory-integral bound,
//! and the padded-count bracket) and reports the smallest slack left before
//! the guarantee would fail. Margins below zero fail the run.

use ndf_core::certnum::eval_frac_scaled;
use ndf_core::digitstream::{max_length, padded_block_count, BlockPattern};
use ndf_core::harmonic::{
    block_indicator, build_smoothed_indicator, coefficient_bound, default_cut_parameters,
    eval_psi, eval_psi_fourier, fourier_coefficient, indicator_for_block, split_dyadic,
    vaughan_decompose, vdc_integral_check, vinogradov_exponents, weighted_prime_sum,
    SmoothedIndicator, WindowSign,
};
use ndf_core::primes::{mangoldt, primes_upto};
use ndf_core::ExactReal;
use serde::Serialize;

use crate::commands::Ctx;
use crate::error::CliError;

#[derive(Serialize)]
pub struct CheckRow {
    pub name: &'static str,
    pub pass: bool,
    /// Smallest slack observed; negative means the guarantee was violated.
    pub margin: f64,
    pub detail: String,
}

#[derive(Serialize)]
pub struct CheckResults {
    pub checks: Vec<CheckRow>,
    pub all_pass: bool,
}

fn row(name: &'static str, margin: f64, detail: String) -> CheckRow {
    CheckRow {
        name,
        pass: margin >= 0.0,
        margin,
        detail,
    }
}

/// SplitMix64; fixed seed so the sampled grids are part of the suite's
/// definition.
struct Rng(u64);

impl Rng {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e37_79b9_7f4a_7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }

    fn unit(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * 2f64.powi(-53)
    }
}

fn sample_windows(rng: &mut Rng) -> Vec<SmoothedIndicator> {
    let mut out = vec![
        // canonical interior window
        build_smoothed_indicator(0.2, 0.5, 0.1, 1000).unwrap(),
        // near-minimal width: the coefficient bound is almost attained at
        // nu = 1, which is what the fault-injection path must trip
        build_smoothed_indicator(0.1, 0.12, 0.015, 1000).unwrap(),
        // wraps past 1
        build_smoothed_indicator(0.9, 1.4, 0.05, 1000).unwrap(),
    ];
    for _ in 0..7 {
        let delta = 0.01 + 0.09 * rng.unit();
        let width = delta + (1.0 - 2.0 * delta) * rng.unit();
        let alpha = rng.unit();
        out.push(build_smoothed_indicator(alpha, alpha + width, delta, 1000).unwrap());
    }
    out
}

fn psi_window_sandwich(windows: &[SmoothedIndicator], rng: &mut Rng) -> CheckRow {
    let mut viol = 0.0f64;
    let mut tested = 0u64;
    for ind in windows {
        let w = ind.beta - ind.alpha;
        for _ in 0..2000 {
            let x = rng.unit();
            let psi = eval_psi(ind, x);
            viol = viol.max(-psi).max(psi - 1.0);
            let rel = (x - ind.alpha).rem_euclid(1.0);
            if rel >= ind.delta / 2.0 + 1e-9 && rel <= w - ind.delta / 2.0 - 1e-9 {
                viol = viol.max((psi - 1.0).abs());
            }
            if rel >= w + ind.delta / 2.0 + 1e-9 && rel <= 1.0 - ind.delta / 2.0 - 1e-9 {
                viol = viol.max(psi.abs());
            }
            tested += 1;
        }
    }
    row(
        "psi_window_sandwich",
        1e-12 - viol,
        format!("{tested} samples over {} windows", windows.len()),
    )
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let h = (b - a) / panels as f64;
    let mut acc = f(a) + f(b);
    for i in 1..panels {
        let w = if i % 2 == 0 { 2.0 } else { 4.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

fn psi_mean_matches_width(windows: &[SmoothedIndicator]) -> CheckRow {
    let mut worst = 0.0f64;
    for ind in windows.iter().take(5) {
        let integral = simpson(|x| eval_psi(ind, x), 0.0, 1.0, 20_000);
        worst = worst.max((integral - (ind.beta - ind.alpha)).abs());
    }
    row(
        "psi_mean_matches_width",
        1e-7 - worst,
        format!("largest |mean - width| = {worst:.3e}"),
    )
}

fn fourier_coefficient_bound(windows: &[SmoothedIndicator], inject_fault: bool) -> CheckRow {
    let factor = if inject_fault { 1.05 } else { 1.0 };
    let mut min_slack = f64::INFINITY;
    let mut worst_nu = 0i64;
    for ind in windows {
        for nu in 1..=2000i64 {
            let mag = fourier_coefficient(ind, nu).norm() * factor;
            let slack = coefficient_bound(ind, nu) - mag;
            if slack < min_slack {
                min_slack = slack;
                worst_nu = nu;
            }
        }
    }
    let note = if inject_fault {
        " (fault injected)"
    } else {
        ""
    };
    row(
        "fourier_coefficient_bound",
        min_slack,
        format!("tightest at nu = {worst_nu}{note}"),
    )
}

fn fourier_truncation_tail(windows: &[SmoothedIndicator], rng: &mut Rng) -> CheckRow {
    let cutoff = 1000;
    let mut min_slack = f64::INFINITY;
    for ind in windows.iter().take(3) {
        for _ in 0..300 {
            let t = rng.unit();
            let (approx, bound) = eval_psi_fourier(ind, t, cutoff);
            let diff = (approx - eval_psi(ind, t)).abs();
            min_slack = min_slack.min(bound - diff);
        }
    }
    row(
        "fourier_truncation_tail",
        min_slack,
        format!("cutoff {cutoff}, 300 points per window"),
    )
}

fn block_window_sandwich(h_override: Option<f64>, rng: &mut Rng) -> Result<CheckRow, CliError> {
    let single = BlockPattern::new(10, vec![3]).unwrap();
    let pair = BlockPattern::new(10, vec![1, 7]).unwrap();
    let configs: Vec<(&BlockPattern, f64)> = match h_override {
        Some(h) => vec![(&single, h), (&pair, h)],
        None => vec![(&single, 100.0), (&single, 1000.0), (&pair, 1000.0)],
    };
    let mut min_slack = f64::INFINITY;
    for (pattern, h) in configs {
        let minus = indicator_for_block(pattern, h, WindowSign::Minus)?;
        let plus = indicator_for_block(pattern, h, WindowSign::Plus)?;
        let gap =
            fourier_coefficient(&plus, 0).re - fourier_coefficient(&minus, 0).re - 2.0 / h;
        min_slack = min_slack.min(1e-12 - gap.abs());
        for _ in 0..4000 {
            let x = rng.unit();
            let b = block_indicator(pattern, x);
            min_slack = min_slack.min(b - eval_psi(&minus, x));
            min_slack = min_slack.min(eval_psi(&plus, x) - b);
        }
    }
    Ok(row(
        "block_window_sandwich",
        min_slack,
        "minus <= indicator <= plus, mean gap 2/H".to_string(),
    ))
}

fn vaughan_identity_checks() -> Result<(CheckRow, CheckRow), CliError> {
    let (p, p1) = (1000u64, 2000u64);
    let (u, v) = default_cut_parameters(p);
    let range = (p1 - p) as f64;

    let direct: f64 = ((p + 1)..=p1).map(mangoldt).sum();
    let zero = vaughan_decompose(p, p1, u, v, &|_| 0.0)?;
    let dev0 = (zero.reconstructed.re - direct)
        .abs()
        .max(zero.reconstructed.im.abs());
    let zero_row = row(
        "vaughan_zero_phase",
        1e-9 * range - dev0,
        format!("|recombined - chebyshev mass| = {dev0:.3e} over ({p}, {p1}]"),
    );

    let phase = |n: u64| 0.37 * (n as f64).powf(1.5);
    let osc = vaughan_decompose(p, p1, u, v, &phase)?;
    let direct_osc = weighted_prime_sum(p, p1, &phase);
    let dev1 = (osc.reconstructed - direct_osc).norm();
    let osc_row = row(
        "vaughan_oscillating_phase",
        1e-6 * range - dev1,
        format!("|recombined - direct| = {dev1:.3e} with cubic phase"),
    );
    Ok((zero_row, osc_row))
}

fn exponent_calculator() -> Result<CheckRow, CliError> {
    let pinned = vinogradov_exponents(&ExactReal::from_integer(1), 2)?;
    let exact = pinned.r == 5
        && pinned.l == 12
        && pinned.eta == ExactReal::from_ratio(1, 576);
    let mut min_eta = f64::INFINITY;
    let mut positive = true;
    for k in 2u32..=20 {
        for rho in [
            ExactReal::from_ratio(1, 2),
            ExactReal::from_ratio(k as i64, 4),
            ExactReal::from_integer(k as i64),
        ] {
            let e = vinogradov_exponents(&rho, k)?;
            positive &= e.eta.is_positive();
            min_eta = min_eta.min(e.eta.to_f64());
        }
    }
    let margin = if exact && positive { min_eta } else { -1.0 };
    Ok(row(
        "exponent_calculator",
        margin,
        format!(
            "(rho=1, k=2) -> (R={}, L={}, eta={}); min eta over grid = {min_eta:.3e}",
            pinned.r, pinned.l, pinned.eta
        ),
    ))
}

fn dyadic_split_cover() -> CheckRow {
    let mut min_slack = f64::INFINITY;
    let mut covers = true;
    for (a, b) in [(0.5, 17.3), (1.0, 2.0), (3.75, 1.1e6)] {
        let pieces = split_dyadic(a, b);
        covers &= pieces.first().map(|p| p.0) == Some(a) && pieces.last().map(|p| p.1) == Some(b);
        for w in pieces.windows(2) {
            covers &= w[0].1 == w[1].0;
        }
        for (lo, hi) in pieces {
            min_slack = min_slack.min(2.0 * lo - hi);
        }
    }
    let margin = if covers { min_slack } else { -1.0 };
    row(
        "dyadic_split_cover",
        margin,
        "contiguous pieces, each at most doubling".to_string(),
    )
}

fn stationary_phase_bound() -> Result<CheckRow, CliError> {
    let mut worst = 0.0f64;
    for t in [10.0, 100.0] {
        let (_, ratio) = vdc_integral_check(|x: f64| t * x.powf(1.5), 2, 0.75 * t, 1.0, 2.0)?;
        worst = worst.max(ratio);
    }
    Ok(row(
        "stationary_phase_bound",
        1.0 - worst,
        format!("largest |integral| * lambda^(1/2) = {worst:.3}"),
    ))
}

fn padded_count_bracket(ctx: &Ctx, h_override: Option<f64>) -> Result<(CheckRow, u64), CliError> {
    let n = 300u64;
    let h = h_override.unwrap_or(1000.0);
    let jmax = max_length(&ctx.f, 10, n, ctx.max_bits)? as u32;
    let primes: Vec<u64> = primes_upto(n).collect();
    let mut escalations = 0u64;
    let mut min_slack = f64::INFINITY;
    for digits in [vec![1u8], vec![2, 3]] {
        let pattern = BlockPattern::new(10, digits).unwrap();
        let ell = pattern.len() as u32;
        if jmax < ell {
            continue;
        }
        let nstar = padded_block_count(&ctx.f, 10, n, &pattern, ctx.max_bits)? as f64;
        let minus = indicator_for_block(&pattern, h, WindowSign::Minus)?;
        let plus = indicator_for_block(&pattern, h, WindowSign::Plus)?;
        let (mut lo, mut hi, mut terms) = (0.0f64, 0.0f64, 0u64);
        for &p in &primes {
            for j in ell..=jmax {
                let (t, cert) = eval_frac_scaled(&ctx.f, p, 1, 10, j, ctx.tol, ctx.max_bits)?;
                escalations += u64::from(cert.escalations);
                lo += eval_psi(&minus, t);
                hi += eval_psi(&plus, t);
                terms += 1;
            }
        }
        // each psi is 2H-Lipschitz and every sampled point carries tol of
        // phase uncertainty
        let slack = terms as f64 * 2.0 * h * ctx.tol;
        min_slack = min_slack.min(nstar - (lo - slack));
        min_slack = min_slack.min((hi + slack) - nstar);
    }
    Ok((
        row(
            "padded_count_bracket",
            min_slack,
            format!("primes to {n}, H = {h}"),
        ),
        escalations,
    ))
}

/// Runs every check in a fixed order; `inject_fault` inflates the measured
/// Fourier magnitudes so the coefficient-bound row must go red.
pub fn run_check_suite(
    ctx: &Ctx,
    inject_fault: bool,
    h_override: Option<f64>,
) -> Result<(CheckResults, u64), CliError> {
    let mut rng = Rng(0x5eed_0f_d1617);
    let windows = sample_windows(&mut rng);

    let mut checks = Vec::with_capacity(11);
    checks.push(psi_window_sandwich(&windows, &mut rng));
    checks.push(psi_mean_matches_width(&windows));
    checks.push(fourier_coefficient_bound(&windows, inject_fault));
    checks.push(fourier_truncation_tail(&windows, &mut rng));
    checks.push(block_window_sandwich(h_override, &mut rng)?);
    let (zero_row, osc_row) = vaughan_identity_checks()?;
    checks.push(zero_row);
    checks.push(osc_row);
    checks.push(exponent_calculator()?);
    checks.push(dyadic_split_cover());
    checks.push(stationary_phase_bound()?);
    let (bracket, escalations) = padded_count_bracket(ctx, h_override)?;
    checks.push(bracket);

    let all_pass = checks.iter().all(|c| c.pass);
    Ok((CheckResults { checks, all_pass }, escalations))
}
