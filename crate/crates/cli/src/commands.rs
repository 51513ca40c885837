//! Command implementations. Each compute_* returns serializable results
//! plus the number of precision-ladder escalations observed while producing
//! them; the caller wraps both into the report envelope.

use std::path::PathBuf;

use ndf_core::certnum::eval_floor_power;
use ndf_core::digitstream::{
    self, digit_length, max_length, read_digit_cache, stream_digits, write_digit_cache,
    BlockCounter, BlockPattern, Mode,
};
use ndf_core::harmonic::{classify_regime, exp_sum_primes, HarmonicError, Regime};
use ndf_core::stats::{fit_log_decay, report_from_counter, summatory_over_primes, QAdditiveFunction};
use ndf_core::{ExactReal, PseudoPolynomial};
use serde::Serialize;

use crate::error::CliError;
use crate::report::fmt_digits;

/// Everything a command needs beyond its own grid flags.
pub struct Ctx {
    pub f: PseudoPolynomial,
    pub base: u32,
    pub mode: Mode,
    pub tol: f64,
    pub max_bits: u32,
    pub cache_dir: Option<PathBuf>,
}

fn cache_file_name(hash: u64) -> String {
    format!("ndf-{hash:016x}.digits")
}

#[derive(Serialize)]
pub struct GenerateSummary {
    pub digit_file: String,
    pub param_hash: String,
    pub l: u64,
    pub items: u64,
    pub n_cutoff: u64,
    pub max_item_length: u64,
    pub truncated: bool,
    pub preview: String,
}

pub fn compute_generate(ctx: &Ctx, l: u64) -> Result<(GenerateSummary, u64), CliError> {
    if l == 0 {
        return Err(CliError::Config("digit budget must be positive".into()));
    }
    let hash = digitstream::param_hash(&ctx.f, ctx.base, ctx.mode);
    let dir = ctx
        .cache_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    let path = dir.join(cache_file_name(hash));

    let stream = stream_digits(&ctx.f, ctx.base, ctx.mode, l as usize, ctx.max_bits)?;
    let mut escalations = stream.escalations;

    // longest item expansion; the materialized last span may be cut short,
    // so the cutoff item is measured from its full value
    let mut max_item = 0usize;
    for w in stream.item_starts.windows(2) {
        max_item = max_item.max(w[1] - w[0]);
    }
    let (last_value, cert) = eval_floor_power(&ctx.f, stream.last_arg, ctx.max_bits)?;
    escalations += u64::from(cert.escalations);
    max_item = max_item.max(digit_length(&last_value, ctx.base));

    let covered = match read_digit_cache(&path) {
        Ok(existing) => existing.param_hash == hash && existing.len >= l,
        Err(_) => false,
    };
    if covered {
        eprintln!("cache hit: {} already covers {l} digits", path.display());
    } else {
        std::fs::create_dir_all(&dir)?;
        write_digit_cache(&path, &stream, hash)?;
        eprintln!("cache written: {}", path.display());
    }

    let preview_len = stream.digits.len().min(32);
    let summary = GenerateSummary {
        digit_file: path.display().to_string(),
        param_hash: format!("{hash:016x}"),
        l: stream.len() as u64,
        items: stream.item_starts.len() as u64,
        n_cutoff: stream.last_arg,
        max_item_length: max_item as u64,
        truncated: stream.truncated,
        preview: fmt_digits(&stream.digits[..preview_len], ctx.base),
    };
    Ok((summary, escalations))
}

/// Digits for analysis commands: reuse the cache when it matches and is
/// long enough, stream otherwise, and persist only when a cache directory
/// was configured. Cache traffic is reported on stderr so reports stay
/// byte-stable.
fn load_digits(ctx: &Ctx, lmax: usize) -> Result<(Vec<u8>, u64), CliError> {
    let hash = digitstream::param_hash(&ctx.f, ctx.base, ctx.mode);
    if let Some(dir) = &ctx.cache_dir {
        let path = dir.join(cache_file_name(hash));
        if let Ok(existing) = read_digit_cache(&path) {
            if existing.param_hash == hash && existing.len >= lmax as u64 {
                eprintln!("cache hit: {}", path.display());
                let mut digits = existing.digits;
                digits.truncate(lmax);
                return Ok((digits, 0));
            }
        }
        let stream = stream_digits(&ctx.f, ctx.base, ctx.mode, lmax, ctx.max_bits)?;
        std::fs::create_dir_all(dir)?;
        write_digit_cache(&path, &stream, hash)?;
        eprintln!("cache written: {}", path.display());
        Ok((stream.digits, stream.escalations))
    } else {
        let stream = stream_digits(&ctx.f, ctx.base, ctx.mode, lmax, ctx.max_bits)?;
        Ok((stream.digits, stream.escalations))
    }
}

#[derive(Serialize)]
pub struct BlockDetail {
    pub pattern: String,
    pub count: u64,
    pub frequency: f64,
    pub deviation: f64,
}

#[derive(Serialize)]
pub struct DiscrepancyRow {
    pub l: u64,
    pub ell: u32,
    pub digits_used: u64,
    pub sup_deviation: f64,
    pub argmax_pattern: String,
    pub r_log_l: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<BlockDetail>,
}

#[derive(Serialize)]
pub struct FitSummary {
    pub c_median: f64,
    pub band_ratio: f64,
}

#[derive(Serialize)]
pub struct DiscrepancyResults {
    pub rows: Vec<DiscrepancyRow>,
    /// Median of R * ln L with the spread of those products; absent when
    /// fewer than three sizes were sampled or some R vanishes.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<FitSummary>,
}

pub fn compute_discrepancy(
    ctx: &Ctx,
    ls: &[u64],
    ell: u32,
    block: Option<&BlockPattern>,
) -> Result<(DiscrepancyResults, u64), CliError> {
    let lmax = *ls.last().expect("validated nonempty") as usize;
    let (digits, escalations) = load_digits(ctx, lmax)?;
    let target = (ctx.base as f64).powi(-(ell as i32));
    let mut rows = Vec::with_capacity(ls.len());
    for &l in ls {
        if (l as usize) < ell as usize {
            return Err(CliError::Config(format!(
                "prefix length {l} is shorter than the block length {ell}"
            )));
        }
        let counter = BlockCounter::count_all(ctx.base, ell, &digits[..l as usize])?;
        let rep = report_from_counter(&counter);
        let detail = block.map(|b| {
            let count = counter.counts()[b.index() as usize];
            let frequency = count as f64 / rep.digits_used as f64;
            BlockDetail {
                pattern: fmt_digits(&b.digits, ctx.base),
                count,
                frequency,
                deviation: frequency - target,
            }
        });
        rows.push(DiscrepancyRow {
            l,
            ell,
            digits_used: rep.digits_used,
            sup_deviation: rep.sup_deviation,
            argmax_pattern: fmt_digits(&rep.argmax_pattern.digits, ctx.base),
            r_log_l: rep.sup_deviation * (l as f64).ln(),
            block: detail,
        });
    }
    let samples: Vec<(u64, f64)> = rows.iter().map(|r| (r.l, r.sup_deviation)).collect();
    let fit = if samples.len() >= 3 {
        fit_log_decay(&samples)
            .ok()
            .map(|(c_median, band_ratio)| FitSummary { c_median, band_ratio })
    } else {
        None
    };
    Ok((DiscrepancyResults { rows, fit }, escalations))
}

pub fn discrepancy_csv(results: &DiscrepancyResults) -> (String, Vec<String>) {
    let with_block = results.rows.iter().any(|r| r.block.is_some());
    let mut header = "L,ell,digits_used,sup_deviation,argmax_pattern,r_log_l".to_string();
    if with_block {
        header.push_str(",block_pattern,block_count,block_frequency,block_deviation");
    }
    let rows = results
        .rows
        .iter()
        .map(|r| {
            let mut line = format!(
                "{},{},{},{},{},{}",
                r.l, r.ell, r.digits_used, r.sup_deviation, r.argmax_pattern, r.r_log_l
            );
            if let Some(b) = &r.block {
                line.push_str(&format!(
                    ",{},{},{},{}",
                    b.pattern, b.count, b.frequency, b.deviation
                ));
            }
            line
        })
        .collect();
    (header, rows)
}

#[derive(Serialize)]
pub struct DigitsumRow {
    pub n: u64,
    pub prime_count: u64,
    pub empirical: f64,
    pub main_term: f64,
    pub residual_per_prime: f64,
}

#[derive(Serialize)]
pub struct DigitsumResults {
    pub rows: Vec<DigitsumRow>,
}

pub fn compute_digitsum(ctx: &Ctx, ns: &[u64]) -> Result<(DigitsumResults, u64), CliError> {
    if ctx.mode != Mode::Primes {
        return Err(CliError::Config(
            "digit-sum totals run over primes; pass --mode primes".into(),
        ));
    }
    let g = QAdditiveFunction::digit_sum(ctx.base);
    let mut rows = Vec::with_capacity(ns.len());
    for &n in ns {
        let rep = summatory_over_primes(&g, &ctx.f, n, ctx.max_bits)?;
        rows.push(DigitsumRow {
            n,
            prime_count: rep.prime_count,
            empirical: rep.empirical,
            main_term: rep.main_term,
            residual_per_prime: rep.residual_per_prime,
        });
    }
    Ok((DigitsumResults { rows }, 0))
}

pub fn digitsum_csv(results: &DigitsumResults) -> (String, Vec<String>) {
    let header = "N,prime_count,empirical,main_term,residual_per_prime".to_string();
    let rows = results
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                r.n, r.prime_count, r.empirical, r.main_term, r.residual_per_prime
            )
        })
        .collect();
    (header, rows)
}

#[derive(Serialize)]
pub struct ExpsumRow {
    pub n: u64,
    pub j: u32,
    pub nu: i64,
    pub regime: &'static str,
    pub re: f64,
    pub im: f64,
    pub magnitude: f64,
    pub normalized_magnitude: f64,
    pub phase_error: f64,
    pub prime_count: u64,
}

#[derive(Serialize)]
pub struct ExpsumResults {
    pub rows: Vec<ExpsumRow>,
}

/// Digit positions to scan when no grid was given: every position of the
/// longest expansion at the cutoff.
pub fn default_j_grid(ctx: &Ctx, n: u64) -> Result<Vec<u32>, CliError> {
    let jmax = max_length(&ctx.f, ctx.base, n, ctx.max_bits)?;
    Ok((1..=jmax as u32).collect())
}

pub fn compute_expsum(
    ctx: &Ctx,
    n: u64,
    j_grid: &[u32],
    nu_grid: &[i64],
    rho: &ExactReal,
) -> Result<(ExpsumResults, u64), CliError> {
    if ctx.mode != Mode::Primes {
        return Err(CliError::Config(
            "exponential sums run over primes; pass --mode primes".into(),
        ));
    }
    if n < 2 {
        return Err(CliError::Config("cutoff must be at least 2".into()));
    }
    let theta = ctx.f.leading_exponent().clone();
    let mut rows = Vec::with_capacity(j_grid.len() * nu_grid.len());
    for &j in j_grid {
        for &nu in nu_grid {
            let s = exp_sum_primes(&ctx.f, ctx.base, n, j, nu, ctx.tol, ctx.max_bits)?;
            let regime = match classify_regime(ctx.base, j, n, &theta, rho) {
                Ok(Regime::MostSignificant) => "most_significant",
                Ok(Regime::LeastSignificant) => "least_significant",
                Err(HarmonicError::OutOfRange { .. }) => "out_of_range",
                Err(e) => return Err(e.into()),
            };
            rows.push(ExpsumRow {
                n,
                j,
                nu,
                regime,
                re: s.value.re,
                im: s.value.im,
                magnitude: s.value.norm(),
                normalized_magnitude: s.normalized_magnitude,
                phase_error: s.phase_error,
                prime_count: s.prime_count,
            });
        }
    }
    Ok((ExpsumResults { rows }, 0))
}

pub fn expsum_csv(results: &ExpsumResults) -> (String, Vec<String>) {
    let header =
        "N,j,nu,regime,re,im,magnitude,normalized_magnitude,phase_error,prime_count".to_string();
    let rows = results
        .rows
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{},{},{},{},{},{}",
                r.n,
                r.j,
                r.nu,
                r.regime,
                r.re,
                r.im,
                r.magnitude,
                r.normalized_magnitude,
                r.phase_error,
                r.prime_count
            )
        })
        .collect();
    (header, rows)
}
