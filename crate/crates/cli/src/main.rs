//! ndf: digit streams of floor-power maps and their equidistribution
//! diagnostics.
//!
//! Subcommands cover the full experiment loop: `generate` materializes the
//! concatenated expansion and its cache file, `discrepancy` and `digitsum`
//! track the block-frequency and digit-sum statistics over growing sample
//! sizes, `expsum` tabulates exponential sums over primes, `check` re-runs
//! the analytic guarantees with measured margins, and `report` bundles all
//! of it into one JSON document.
//!
//! Exit codes: 0 success, 2 rejected configuration, 3 a certified
//! evaluation stayed ambiguous at the precision cap, 4 check failure,
//! 1 anything else.

mod checks;
mod commands;
mod config;
mod error;
mod report;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ndf_core::digitstream::Mode;
use ndf_core::ExactReal;
use serde::Serialize;

use commands::Ctx;
use error::CliError;
use report::{emit_csv, emit_json, ConfigEcho, Provenance, Report};

#[derive(Parser)]
#[command(
    name = "ndf",
    version,
    about = "Digit streams of floor-power maps and their equidistribution diagnostics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Materialize leading digits and write the digit cache file
    Generate(GenerateArgs),
    /// Block-frequency discrepancy over prefix sizes
    Discrepancy(DiscrepancyArgs),
    /// Digit-sum totals over primes against the main-term prediction
    Digitsum(DigitsumArgs),
    /// Exponential sums over primes on a digit-position x frequency grid
    Expsum(ExpsumArgs),
    /// Verification suite for the analytic machinery
    Check(CheckArgs),
    /// Bundled experiment: discrepancy, digit sums, exponential sums, checks
    Report(ReportArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// Map as '+'-joined <coeff>^<exponent> terms, e.g. "1^3/2"
    #[arg(long)]
    f: Option<String>,

    /// Coefficient of the single-power map alpha * x^theta
    #[arg(long, conflicts_with = "f")]
    alpha: Option<String>,

    /// Exponent of the single-power map alpha * x^theta
    #[arg(long, conflicts_with = "f")]
    theta: Option<String>,

    /// Expansion base q
    #[arg(long, default_value_t = 10)]
    base: u32,

    /// Argument sequence feeding the concatenation
    #[arg(long, value_enum, default_value_t = ModeArg::Primes)]
    mode: ModeArg,

    /// Fractional-bit cap for certified evaluation
    #[arg(long, default_value_t = ndf_core::DEFAULT_MAX_BITS)]
    max_bits: u32,

    /// Tolerance for fractional-part and smoothed-sum paths
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,

    /// Worker threads: 0 = all cores, 1 = the sequential golden path
    #[arg(long, default_value_t = 0)]
    threads: usize,

    /// Write the report here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,

    /// json for structured reports, csv for grid commands
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,

    /// Digit cache directory; the NDF_CACHE_DIR variable overrides this
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Digit budget L
    #[arg(long)]
    digits: u64,
}

#[derive(Args)]
struct DiscrepancyArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Single prefix length; overrides --decades
    #[arg(long)]
    digits: Option<u64>,

    /// Prefix sizes: `3..6` for powers of ten or an explicit comma list
    #[arg(long, default_value = "3..6")]
    decades: String,

    /// Block length; defaults to 1 or to the --block length
    #[arg(long)]
    ell: Option<u32>,

    /// Focus block reported alongside the supremum, e.g. "17"
    #[arg(long)]
    block: Option<String>,
}

#[derive(Args)]
struct DigitsumArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Single prime cutoff; overrides --decades
    #[arg(long)]
    upto: Option<u64>,

    /// Cutoffs: `4..6` for powers of ten or an explicit comma list
    #[arg(long, default_value = "4..6")]
    decades: String,
}

#[derive(Args)]
struct ExpsumArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Prime cutoff N
    #[arg(long, default_value_t = 10_000)]
    upto: u64,

    /// Digit positions: `1..8` or a comma list; spans the longest
    /// expansion when omitted
    #[arg(long)]
    j: Option<String>,

    /// Frequencies: `1..10` or a comma list, zero excluded
    #[arg(long, default_value = "1..10")]
    nu: String,

    /// Savings exponent labeling the regime split
    #[arg(long, default_value = "1/2")]
    rho: String,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    common: CommonArgs,

    /// Window sharpness for the block-window and bracket checks
    #[arg(long = "H")]
    h: Option<f64>,

    /// Inflate measured Fourier magnitudes so the coefficient-bound check
    /// must fail; exercises the failure path
    #[arg(long, hide = true)]
    inject_fault: bool,
}

#[derive(Args)]
struct ReportArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Integers,
    Primes,
}

impl ModeArg {
    fn to_mode(self) -> Mode {
        match self {
            ModeArg::Integers => Mode::Integers,
            ModeArg::Primes => Mode::Primes,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl FormatArg {
    fn as_str(self) -> &'static str {
        match self {
            FormatArg::Json => "json",
            FormatArg::Csv => "csv",
        }
    }
}

/// Everything `report` bundles into one document.
#[derive(Serialize)]
struct ReportBundle {
    discrepancy: commands::DiscrepancyResults,
    digitsum: commands::DigitsumResults,
    expsum: commands::ExpsumResults,
    check: checks::CheckResults,
}

fn main() {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

fn common_args(command: &Command) -> &CommonArgs {
    match command {
        Command::Generate(a) => &a.common,
        Command::Discrepancy(a) => &a.common,
        Command::Digitsum(a) => &a.common,
        Command::Expsum(a) => &a.common,
        Command::Check(a) => &a.common,
        Command::Report(a) => &a.common,
    }
}

fn init_threads(requested: usize) -> Result<usize, CliError> {
    if requested >= 1 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(requested)
            .build_global()
            .map_err(|e| CliError::Other(format!("thread pool: {e}")))?;
    }
    Ok(rayon::current_num_threads())
}

fn echo_base(
    command: &'static str,
    common: &CommonArgs,
    ctx: &Ctx,
    format: FormatArg,
) -> ConfigEcho {
    ConfigEcho {
        command,
        f: ctx.f.canonical_string(),
        base: ctx.base,
        mode: ctx.mode.as_str(),
        tol: ctx.tol,
        max_bits: ctx.max_bits,
        threads: common.threads,
        format: format.as_str(),
        ..ConfigEcho::default()
    }
}

fn run(cli: Cli) -> Result<i32, CliError> {
    let common = common_args(&cli.command);
    config::validate_base(common.base)?;
    config::validate_tol(common.tol)?;
    let f = config::resolve_map(
        common.f.as_deref(),
        common.alpha.as_deref(),
        common.theta.as_deref(),
    )?;
    let cache_dir = std::env::var_os("NDF_CACHE_DIR")
        .map(PathBuf::from)
        .or_else(|| common.cache_dir.clone());
    let effective_threads = init_threads(common.threads)?;
    let provenance = Provenance {
        version: env!("CARGO_PKG_VERSION"),
        threads: effective_threads,
        sequential: common.threads == 1,
        escalations: 0,
    };
    let format = common.format;
    let output = common.output.clone();
    let ctx = Ctx {
        f,
        base: common.base,
        mode: common.mode.to_mode(),
        tol: common.tol,
        max_bits: common.max_bits,
        cache_dir,
    };

    let grid_command = matches!(
        cli.command,
        Command::Discrepancy(_) | Command::Digitsum(_) | Command::Expsum(_)
    );
    if format == FormatArg::Csv && !grid_command {
        return Err(CliError::Config(
            "csv output is for the grid commands (discrepancy, digitsum, expsum)".into(),
        ));
    }

    match &cli.command {
        Command::Generate(a) => {
            let (results, escalations) = commands::compute_generate(&ctx, a.digits)?;
            let mut echo = echo_base("generate", &a.common, &ctx, format);
            echo.digits = Some(a.digits);
            emit_json(
                &Report {
                    config: echo,
                    results,
                    provenance: Provenance {
                        escalations,
                        ..provenance
                    },
                },
                output.as_deref(),
            )?;
            Ok(0)
        }
        Command::Discrepancy(a) => {
            let ls = match a.digits {
                Some(l) => vec![l],
                None => config::parse_decades(&a.decades)?,
            };
            let block = a
                .block
                .as_deref()
                .map(|text| config::parse_block(text, ctx.base))
                .transpose()?;
            let ell = match (&block, a.ell) {
                (Some(b), Some(e)) if b.len() as u32 != e => {
                    return Err(CliError::Config(format!(
                        "--ell {e} disagrees with the {}-digit --block",
                        b.len()
                    )))
                }
                (Some(b), _) => b.len() as u32,
                (None, Some(e)) => e,
                (None, None) => 1,
            };
            config::validate_ell(ctx.base, ell)?;
            let (results, escalations) =
                commands::compute_discrepancy(&ctx, &ls, ell, block.as_ref())?;
            let mut echo = echo_base("discrepancy", &a.common, &ctx, format);
            if a.digits.is_some() {
                echo.digits = a.digits;
            } else {
                echo.decades = Some(ls.clone());
            }
            echo.ell = Some(ell);
            echo.block = block.as_ref().map(|b| report::fmt_digits(&b.digits, ctx.base));
            match format {
                FormatArg::Json => emit_json(
                    &Report {
                        config: echo,
                        results,
                        provenance: Provenance {
                            escalations,
                            ..provenance
                        },
                    },
                    output.as_deref(),
                )?,
                FormatArg::Csv => {
                    let (header, rows) = commands::discrepancy_csv(&results);
                    emit_csv(&header, &rows, output.as_deref())?;
                }
            }
            Ok(0)
        }
        Command::Digitsum(a) => {
            let ns = match a.upto {
                Some(n) if n >= 2 => vec![n],
                Some(n) => {
                    return Err(CliError::Config(format!("cutoff {n} must be at least 2")))
                }
                None => config::parse_decades(&a.decades)?,
            };
            let (results, escalations) = commands::compute_digitsum(&ctx, &ns)?;
            let mut echo = echo_base("digitsum", &a.common, &ctx, format);
            if a.upto.is_some() {
                echo.upto = a.upto;
            } else {
                echo.decades = Some(ns.clone());
            }
            match format {
                FormatArg::Json => emit_json(
                    &Report {
                        config: echo,
                        results,
                        provenance: Provenance {
                            escalations,
                            ..provenance
                        },
                    },
                    output.as_deref(),
                )?,
                FormatArg::Csv => {
                    let (header, rows) = commands::digitsum_csv(&results);
                    emit_csv(&header, &rows, output.as_deref())?;
                }
            }
            Ok(0)
        }
        Command::Expsum(a) => {
            if ctx.mode != Mode::Primes {
                return Err(CliError::Config(
                    "exponential sums run over primes; pass --mode primes".into(),
                ));
            }
            let j_grid = match &a.j {
                Some(text) => config::parse_j_grid(text)?,
                None => commands::default_j_grid(&ctx, a.upto)?,
            };
            let nu_grid = config::parse_nu_grid(&a.nu)?;
            let rho = ExactReal::parse(&a.rho)
                .map_err(|e| CliError::Config(format!("bad rho: {e}")))?;
            if !rho.is_positive() {
                return Err(CliError::Config("rho must be positive".into()));
            }
            let (results, escalations) =
                commands::compute_expsum(&ctx, a.upto, &j_grid, &nu_grid, &rho)?;
            let mut echo = echo_base("expsum", &a.common, &ctx, format);
            echo.upto = Some(a.upto);
            echo.j = Some(j_grid);
            echo.nu = Some(nu_grid);
            echo.rho = Some(a.rho.clone());
            match format {
                FormatArg::Json => emit_json(
                    &Report {
                        config: echo,
                        results,
                        provenance: Provenance {
                            escalations,
                            ..provenance
                        },
                    },
                    output.as_deref(),
                )?,
                FormatArg::Csv => {
                    let (header, rows) = commands::expsum_csv(&results);
                    emit_csv(&header, &rows, output.as_deref())?;
                }
            }
            Ok(0)
        }
        Command::Check(a) => {
            if let Some(h) = a.h {
                if h <= 400.0 {
                    return Err(CliError::Config(
                        "H must exceed 400, four times the built-in ell = 2 pattern space".into(),
                    ));
                }
            }
            let (results, escalations) = checks::run_check_suite(&ctx, a.inject_fault, a.h)?;
            let all_pass = results.all_pass;
            let mut echo = echo_base("check", &a.common, &ctx, format);
            echo.h = a.h;
            emit_json(
                &Report {
                    config: echo,
                    results,
                    provenance: Provenance {
                        escalations,
                        ..provenance
                    },
                },
                output.as_deref(),
            )?;
            Ok(if all_pass { 0 } else { 4 })
        }
        Command::Report(a) => {
            if ctx.mode != Mode::Primes {
                return Err(CliError::Config(
                    "the bundled report runs over primes; pass --mode primes".into(),
                ));
            }
            let (discrepancy, esc_disc) =
                commands::compute_discrepancy(&ctx, &[1_000, 10_000, 100_000], 1, None)?;
            let (digitsum, _) = commands::compute_digitsum(&ctx, &[10_000, 100_000])?;
            let j_grid = commands::default_j_grid(&ctx, 10_000)?;
            let rho = ExactReal::from_ratio(1, 2);
            let (expsum, _) =
                commands::compute_expsum(&ctx, 10_000, &j_grid, &[1, 2, 3, 4], &rho)?;
            let (check, esc_check) = checks::run_check_suite(&ctx, false, None)?;
            let all_pass = check.all_pass;
            let results = ReportBundle {
                discrepancy,
                digitsum,
                expsum,
                check,
            };
            let echo = echo_base("report", &a.common, &ctx, format);
            emit_json(
                &Report {
                    config: echo,
                    results,
                    provenance: Provenance {
                        escalations: esc_disc + esc_check,
                        ..provenance
                    },
                },
                output.as_deref(),
            )?;
            Ok(if all_pass { 0 } else { 4 })
        }
    }
}
