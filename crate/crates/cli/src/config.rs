//! Flag parsing beyond clap's per-field reach: pseudo-polynomial terms,
//! decade and integer grids, block patterns, and the validation that must
//! pass before any computation starts.

use ndf_core::digitstream::{BlockPattern, MAX_BLOCK_LEN, MAX_TABLE_SIZE};
use ndf_core::{ExactReal, PseudoPolynomial};

/// Rejected configuration; maps to exit code 2.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn bad(msg: impl Into<String>) -> ConfigError {
    ConfigError(msg.into())
}

/// Parses '+'-separated `<coeff>^<exponent>` terms; both sides are exact
/// decimals or ratios, e.g. `1^3/2` or `2.5^2+1^1/2`.
pub fn parse_poly(text: &str) -> Result<PseudoPolynomial, ConfigError> {
    let mut terms = Vec::new();
    for part in text.split('+') {
        let (c, e) = part
            .split_once('^')
            .ok_or_else(|| bad(format!("term {part:?} is not <coeff>^<exponent>")))?;
        let coeff = ExactReal::parse(c.trim()).map_err(|err| bad(err.to_string()))?;
        let exp = ExactReal::parse(e.trim()).map_err(|err| bad(err.to_string()))?;
        terms.push((coeff, exp));
    }
    PseudoPolynomial::new(terms).map_err(|err| bad(err.to_string()))
}

/// The map under study: `--f` wins, otherwise `alpha * x^theta` with
/// defaults alpha = 1, theta = 3/2.
pub fn resolve_map(
    f: Option<&str>,
    alpha: Option<&str>,
    theta: Option<&str>,
) -> Result<PseudoPolynomial, ConfigError> {
    if let Some(text) = f {
        return parse_poly(text);
    }
    let alpha = ExactReal::parse(alpha.unwrap_or("1")).map_err(|e| bad(e.to_string()))?;
    let theta = ExactReal::parse(theta.unwrap_or("3/2")).map_err(|e| bad(e.to_string()))?;
    PseudoPolynomial::power(alpha, theta).map_err(|e| bad(e.to_string()))
}

/// Decade grids: `3..6` means 10^3 through 10^6; a comma list gives
/// explicit sizes. Values must be at least 2 and strictly increasing.
pub fn parse_decades(text: &str) -> Result<Vec<u64>, ConfigError> {
    let values: Vec<u64> = if let Some((a, b)) = text.split_once("..") {
        let lo: u32 = a
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad decade range {text:?}")))?;
        let hi: u32 = b
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad decade range {text:?}")))?;
        if lo > hi || hi > 18 {
            return Err(bad(format!(
                "decade range {text:?} must satisfy lo <= hi <= 18"
            )));
        }
        (lo..=hi).map(|d| 10u64.pow(d)).collect()
    } else {
        text.split(',')
            .map(|v| {
                v.trim()
                    .parse::<u64>()
                    .map_err(|_| bad(format!("bad grid value {v:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad("empty grid"));
    }
    if values.iter().any(|&v| v < 2) {
        return Err(bad("grid values must be at least 2"));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("grid values must strictly increase"));
    }
    Ok(values)
}

fn parse_int_grid(text: &str) -> Result<Vec<i64>, ConfigError> {
    let values: Vec<i64> = if let Some((a, b)) = text.split_once("..") {
        let lo: i64 = a
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad range {text:?}")))?;
        let hi: i64 = b
            .trim()
            .parse()
            .map_err(|_| bad(format!("bad range {text:?}")))?;
        if lo > hi || hi.saturating_sub(lo) > 100_000 {
            return Err(bad(format!("range {text:?} is empty or too large")));
        }
        (lo..=hi).collect()
    } else {
        text.split(',')
            .map(|v| {
                v.trim()
                    .parse::<i64>()
                    .map_err(|_| bad(format!("bad grid value {v:?}")))
            })
            .collect::<Result<_, _>>()?
    };
    if values.is_empty() {
        return Err(bad("empty grid"));
    }
    if values.windows(2).any(|w| w[0] >= w[1]) {
        return Err(bad("grid values must strictly increase"));
    }
    Ok(values)
}

/// Digit positions, e.g. `1..8` or `2,4,6`.
pub fn parse_j_grid(text: &str) -> Result<Vec<u32>, ConfigError> {
    parse_int_grid(text)?
        .into_iter()
        .map(|v| {
            u32::try_from(v)
                .ok()
                .filter(|&j| j >= 1)
                .ok_or_else(|| bad(format!("digit position {v} must be a positive integer")))
        })
        .collect()
}

/// Nonzero frequencies, e.g. `1..10` or `-3,1,7`.
pub fn parse_nu_grid(text: &str) -> Result<Vec<i64>, ConfigError> {
    let values = parse_int_grid(text)?;
    if values.contains(&0) {
        return Err(bad("frequency 0 is the trivial coefficient; drop it from the grid"));
    }
    Ok(values)
}

/// Digit blocks: one character per digit for bases up to 10 (`17`),
/// comma-separated digit values otherwise (`11,7`).
pub fn parse_block(text: &str, base: u32) -> Result<BlockPattern, ConfigError> {
    let digits: Vec<u8> = if text.contains(',') {
        text.split(',')
            .map(|d| {
                d.trim()
                    .parse::<u8>()
                    .map_err(|_| bad(format!("bad block digit {d:?}")))
            })
            .collect::<Result<_, _>>()?
    } else if base <= 10 {
        text.chars()
            .map(|c| {
                c.to_digit(10)
                    .map(|d| d as u8)
                    .ok_or_else(|| bad(format!("bad block digit {c:?}")))
            })
            .collect::<Result<_, _>>()?
    } else {
        return Err(bad(
            "blocks in bases above 10 need comma-separated digit values",
        ));
    };
    BlockPattern::new(base, digits).map_err(|e| bad(e.to_string()))
}

pub fn validate_base(base: u32) -> Result<(), ConfigError> {
    if !(2..=256).contains(&base) {
        return Err(bad(format!("base {base} outside supported range 2..=256")));
    }
    Ok(())
}

/// Block length bounds plus the dense-table memory cap.
pub fn validate_ell(base: u32, ell: u32) -> Result<(), ConfigError> {
    if !(1..=MAX_BLOCK_LEN).contains(&ell) {
        return Err(bad(format!("ell must lie in 1..={MAX_BLOCK_LEN}")));
    }
    match (base as u64).checked_pow(ell) {
        Some(space) if space <= MAX_TABLE_SIZE => Ok(()),
        _ => Err(bad(format!(
            "pattern space {base}^{ell} exceeds the {MAX_TABLE_SIZE}-entry table cap"
        ))),
    }
}

pub fn validate_tol(tol: f64) -> Result<(), ConfigError> {
    if !(tol > 0.0 && tol < 0.25) {
        return Err(bad("tolerance must lie in (0, 1/4)"));
    }
    Ok(())
}
