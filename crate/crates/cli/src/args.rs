use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use alpha_forge::avgalpha::{DEFAULT_SAMPLES, DEFAULT_SEED};
use alpha_forge::DEFAULT_SEGMENT_SIZE;

pub const WORKERS_ENV: &str = "ALPHA_FORGE_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "alpha-forge",
    version,
    about = "Murphy's alpha, Dickman rho predictions and smoothness censuses of binary forms",
    args_override_self = true
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = WORKERS_ENV)]
    #[serde(skip)]
    pub workers: Option<usize>,
    /// Sieve segment width; fixes the summation order of every parallel kernel.
    #[arg(long, global = true, default_value_t = DEFAULT_SEGMENT_SIZE, value_parser = parse_count)]
    pub segment_size: u64,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Same as `--format json`.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub json: bool,
    /// TOML file with the same keys as the flags; flags on the command line win.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Omit run metadata (timings, worker count) so reports compare byte for byte.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub reproducible: bool,
    /// Also write the report's table as CSV to this path.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub export: Option<PathBuf>,
}

impl GlobalArgs {
    pub fn format(&self) -> Format {
        if self.json {
            Format::Json
        } else {
            self.format
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Partial α sum with an RH-certified interval.
    Alpha(AlphaArgs),
    /// Dickman ρ or one of its derivatives.
    Rho(RhoArgs),
    /// Ψ(x, B) estimates, optionally α-shifted.
    Predict(PredictArgs),
    /// Smooth census of a positive definite quadratic form.
    Census(CensusArgs),
    /// Empirical smooth ratio of a form against the α-shifted prediction.
    #[command(name = "experiment-t42")]
    ExperimentT42(ExperimentArgs),
    /// Averages of α_p over boxes of monic polynomials.
    Avg(AvgArgs),
    /// Invariants of an imaginary quadratic field.
    Field(FieldArgs),
    /// Exact count of B-smooth integers up to x.
    Psi(PsiArgs),
}

impl Command {
    pub const NAMES: [&'static str; 8] = [
        "alpha",
        "rho",
        "predict",
        "census",
        "experiment-t42",
        "avg",
        "field",
        "psi",
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Command::Alpha(_) => "alpha",
            Command::Rho(_) => "rho",
            Command::Predict(_) => "predict",
            Command::Census(_) => "census",
            Command::ExperimentT42(_) => "experiment-t42",
            Command::Avg(_) => "avg",
            Command::Field(_) => "field",
            Command::Psi(_) => "psi",
        }
    }
}

/// Explicit number-field data for polynomials whose field parameters are
/// not derived automatically.
#[derive(Debug, Args, Serialize)]
pub struct FieldOverride {
    /// Degree of the number field.
    #[arg(long, requires_all = ["field_disc", "p0"])]
    pub field_degree: Option<u32>,
    /// Absolute discriminant of the number field.
    #[arg(long, requires_all = ["field_degree", "p0"])]
    pub field_disc: Option<String>,
    /// Every prime above p0 is unramified and prime to the index.
    #[arg(long, requires_all = ["field_degree", "field_disc"], value_parser = parse_count)]
    pub p0: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct AlphaArgs {
    /// Ascending coefficients, e.g. "1,0,1" for X²+1.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    /// Sum α_p over primes p ≤ cutoff.
    #[arg(long, value_parser = parse_count)]
    pub cutoff: u64,
    /// Fail unless the RH tail interval can be certified.
    #[arg(long)]
    pub rh_tail: bool,
    /// Comma-separated primes whose local α_p is reported.
    #[arg(long, value_delimiter = ',', value_parser = parse_count)]
    pub local: Vec<u64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldOverride,
}

#[derive(Debug, Args, Serialize)]
pub struct RhoArgs {
    /// Argument u ≥ 0.
    #[arg(long)]
    pub u: f64,
    /// Derivative order.
    #[arg(long, default_value_t = 0)]
    pub deriv: u32,
}

#[derive(Debug, Args, Serialize)]
pub struct PredictArgs {
    /// Upper end of the range.
    #[arg(long)]
    pub x: f64,
    /// Smoothness bound B.
    #[arg(long)]
    pub bound: f64,
    /// Shift x to x·e^α.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<f64>,
    /// Headline the two-term estimate instead of x ρ(u).
    #[arg(long)]
    pub saias: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct CensusArgs {
    /// Ascending coefficients of a positive definite quadratic.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    /// Count pairs with F(a, b) ≤ norm bound.
    #[arg(long, value_parser = parse_count)]
    pub norm_bound: u64,
    /// Largest prime allowed in F(a, b).
    #[arg(long, value_parser = parse_count)]
    pub smooth_bound: u64,
    /// Cross-check against brute-force factorization.
    #[arg(long)]
    pub oracle: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ExperimentArgs {
    /// Ascending coefficients of a positive definite quadratic.
    #[arg(long, allow_hyphen_values = true)]
    pub poly: String,
    /// One or more norm bounds.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
    pub norm_bound: Vec<u64>,
    /// One or more smoothness bounds.
    #[arg(long, value_delimiter = ',', value_parser = parse_count, required = true)]
    pub smooth_bound: Vec<u64>,
    /// Prime cutoff for the α partial sum.
    #[arg(long, value_parser = parse_count, default_value = "1000000")]
    pub alpha_cutoff: u64,
    /// Relative gap accepted between the empirical and predicted ratios.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub field: FieldOverride,
}

#[derive(Debug, Args, Serialize)]
pub struct AvgArgs {
    /// Degree d of the monic polynomials.
    #[arg(long)]
    pub degree: usize,
    /// Coefficient intervals "lo:hi,lo:hi,…" for f_0 … f_{d−1}.
    #[arg(long = "box", allow_hyphen_values = true)]
    #[serde(rename = "box")]
    pub coeff_box: Option<String>,
    /// Single prime p for the mean of α_p.
    #[arg(long, value_parser = parse_count)]
    pub prime: Option<u64>,
    /// Mean over [−m, m]^d for each listed m.
    #[arg(long, value_delimiter = ',', conflicts_with = "coeff_box")]
    pub sweep: Vec<i64>,
    /// Monte Carlo draws for boxes too large to enumerate.
    #[arg(long, value_parser = parse_count, default_value_t = DEFAULT_SAMPLES)]
    pub samples: u64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Histogram of Σ_{p ≤ prime-bound} α_p over the box with this many bins.
    #[arg(long, requires = "coeff_box")]
    pub histogram: Option<usize>,
    #[arg(long, value_parser = parse_count, default_value_t = 100)]
    pub prime_bound: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct FieldArgs {
    /// Fundamental discriminant D < 0.
    #[arg(long, allow_hyphen_values = true)]
    pub disc: i64,
    /// Report h, λ_K and γ_0(K).
    #[arg(long)]
    pub class_number: bool,
    /// Report R(t), ψ_K(t) and the RH envelope at t.
    #[arg(long, value_parser = parse_count)]
    pub remainder: Option<u64>,
    /// Count primitive ideals of norm at most x.
    #[arg(long, value_parser = parse_count)]
    pub primitive_count: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct PsiArgs {
    /// Upper end of the range.
    #[arg(long, value_parser = parse_count)]
    pub x: u64,
    /// Smoothness bound B.
    #[arg(long, value_parser = parse_count)]
    pub bound: u64,
}

/// A non-negative integer, also accepted in exact scientific notation
/// (`1e6`, `2.5e3`).
pub fn parse_count(s: &str) -> Result<u64, String> {
    let s = s.trim().replace('_', "");
    if let Ok(v) = s.parse::<u64>() {
        return Ok(v);
    }
    let Some((mant, exp)) = s.split_once(['e', 'E']) else {
        return Err(format!("{s:?} is not a non-negative integer"));
    };
    let exp: u32 = exp.parse().map_err(|_| format!("bad exponent in {s:?}"))?;
    let (int, frac) = mant.split_once('.').unwrap_or((mant, ""));
    let frac = frac.trim_end_matches('0');
    if frac.len() as u32 > exp || !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) || int.is_empty() {
        return Err(format!("{s:?} is not an integer"));
    }
    let digits = format!("{int}{frac}");
    let scale = 10u64
        .checked_pow(exp - frac.len() as u32)
        .ok_or_else(|| format!("{s:?} overflows 64 bits"))?;
    digits
        .parse::<u64>()
        .ok()
        .and_then(|d| d.checked_mul(scale))
        .ok_or_else(|| format!("{s:?} overflows 64 bits"))
}
