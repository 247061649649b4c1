//! Command-line definitions and resolution of pricing inputs from flags,
//! an optional `key = value` config file and built-in defaults.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use mfbm_asian::{Averaging, Fidelity, ModelParams, OptionKind};

use crate::CliError;

/// Default seed when neither `--seed` nor `MFBM_ASIAN_SEED` is given.
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(
    name = "mfbm-asian",
    version,
    about = "Asian and Asian power option pricing under mixed fractional Brownian motion with jumps"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Price one contract (JSON by default).
    Price(PriceArgs),
    /// Price a one- or two-dimensional parameter grid as CSV.
    Sweep(SweepArgs),
    /// Compare closed forms with a Monte Carlo oracle over a preset grid.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AvgArg {
    Geometric,
    Arithmetic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FidelityArg {
    Paper,
    Consistent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleArg {
    Conditional,
    Path,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GridArg {
    Small,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Axis {
    Hurst,
    SigmaJ,
    MuJ,
    Strike,
    Maturity,
}

impl From<KindArg> for OptionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Call => OptionKind::Call,
            KindArg::Put => OptionKind::Put,
        }
    }
}

impl From<AvgArg> for Averaging {
    fn from(a: AvgArg) -> Self {
        match a {
            AvgArg::Geometric => Averaging::Geometric,
            AvgArg::Arithmetic => Averaging::Arithmetic,
        }
    }
}

impl From<FidelityArg> for Fidelity {
    fn from(f: FidelityArg) -> Self {
        match f {
            FidelityArg::Paper => Fidelity::Paper,
            FidelityArg::Consistent => Fidelity::Consistent,
        }
    }
}

/// Model and contract inputs. Unset values come from `--config`, then from
/// the defaults: `s0 100, r 0.05, q 0, sigma 0.2, eps 0, h 0.5, lambda 0,
/// mu-j 0, sigma-j 0, kind call, avg geometric, m 1, fidelity paper`.
/// `k` and `t` have no default.
#[derive(Debug, Clone, Default, Args)]
pub struct PricingArgs {
    /// Flat `key = value` file; keys are the flag names without dashes.
    #[arg(long, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Spot price.
    #[arg(long, allow_negative_numbers = true)]
    pub s0: Option<f64>,
    /// Strike.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    /// Maturity in years.
    #[arg(long, allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// Risk-free rate.
    #[arg(long, allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// Dividend yield.
    #[arg(long, allow_negative_numbers = true)]
    pub q: Option<f64>,
    /// Brownian volatility.
    #[arg(long, allow_negative_numbers = true)]
    pub sigma: Option<f64>,
    /// Fractional volatility coefficient.
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    /// Hurst exponent.
    #[arg(long, allow_negative_numbers = true)]
    pub h: Option<f64>,
    /// Jump intensity per year.
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// Mean of the log jump size.
    #[arg(long = "mu-j", allow_negative_numbers = true)]
    pub mu_j: Option<f64>,
    /// Standard deviation of the log jump size.
    #[arg(long = "sigma-j", allow_negative_numbers = true)]
    pub sigma_j: Option<f64>,
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    #[arg(long, value_enum)]
    pub avg: Option<AvgArg>,
    /// Power applied to the average.
    #[arg(long)]
    pub m: Option<u32>,
    #[arg(long, value_enum)]
    pub fidelity: Option<FidelityArg>,
}

/// Optional Monte Carlo estimate attached to analytic output.
#[derive(Debug, Clone, Args)]
pub struct McArgs {
    /// Paths (or conditional draws); 0 disables the estimate.
    #[arg(long, default_value_t = 0)]
    pub mc_paths: usize,
    /// Time steps of the path engine.
    #[arg(long, default_value_t = 256)]
    pub mc_steps: usize,
    #[arg(long, value_enum, default_value_t = OracleArg::Path)]
    pub mc_oracle: OracleArg,
    /// Geometric control variate for arithmetic contracts.
    #[arg(long)]
    pub control_variate: bool,
    #[arg(long, env = "MFBM_ASIAN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args)]
pub struct PriceArgs {
    #[command(flatten)]
    pub pricing: PricingArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    pub format: FormatArg,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub pricing: PricingArgs,
    #[command(flatten)]
    pub mc: McArgs,
    #[arg(long, value_enum)]
    pub axis: Axis,
    #[arg(long, allow_negative_numbers = true)]
    pub start: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub stop: f64,
    #[arg(long)]
    pub count: usize,
    #[arg(long, value_enum)]
    pub axis2: Option<Axis>,
    #[arg(long, allow_negative_numbers = true)]
    pub start2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub stop2: Option<f64>,
    #[arg(long)]
    pub count2: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ValidateArgs {
    #[arg(long, value_enum, default_value_t = OracleArg::Conditional)]
    pub oracle: OracleArg,
    #[arg(long, value_enum, default_value_t = GridArg::Small)]
    pub grid: GridArg,
    #[arg(long, env = "MFBM_ASIAN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Override the preset sample or path count.
    #[arg(long)]
    pub samples: Option<usize>,
    /// Override the preset number of time steps (path oracle).
    #[arg(long)]
    pub steps: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub threads: usize,
}

/// Inputs after merging flags, config file and defaults. Strike and
/// maturity stay optional so a sweep can supply them from its axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Resolved {
    pub model: ModelParams,
    pub strike: Option<f64>,
    pub maturity: Option<f64>,
    pub kind: OptionKind,
    pub averaging: Averaging,
    pub power: u32,
    pub fidelity: Fidelity,
}

impl PricingArgs {
    pub fn resolve(&self) -> Result<Resolved, CliError> {
        let file = match &self.config {
            Some(path) => read_config(path)?,
            None => PricingArgs::default(),
        };
        let d = ModelParams::default();
        let pick =
            |flag: Option<f64>, file: Option<f64>, default: f64| flag.or(file).unwrap_or(default);
        Ok(Resolved {
            model: ModelParams {
                s0: pick(self.s0, file.s0, d.s0),
                r: pick(self.r, file.r, d.r),
                q: pick(self.q, file.q, d.q),
                sigma: pick(self.sigma, file.sigma, d.sigma),
                epsilon: pick(self.eps, file.eps, d.epsilon),
                hurst: pick(self.h, file.h, d.hurst),
                lambda: pick(self.lambda, file.lambda, d.lambda),
                mu_j: pick(self.mu_j, file.mu_j, d.mu_j),
                sigma_j: pick(self.sigma_j, file.sigma_j, d.sigma_j),
            },
            strike: self.k.or(file.k),
            maturity: self.t.or(file.t),
            kind: self.kind.or(file.kind).unwrap_or(KindArg::Call).into(),
            averaging: self.avg.or(file.avg).unwrap_or(AvgArg::Geometric).into(),
            power: self.m.or(file.m).unwrap_or(1),
            fidelity: self
                .fidelity
                .or(file.fidelity)
                .unwrap_or(FidelityArg::Paper)
                .into(),
        })
    }
}

fn read_config(path: &Path) -> Result<PricingArgs, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Invalid(format!("cannot read config {}: {e}", path.display())))?;
    parse_config(&text)
}

/// Parses `key = value` lines; `#` starts a comment, blank lines are skipped.
pub fn parse_config(text: &str) -> Result<PricingArgs, CliError> {
    let mut out = PricingArgs::default();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Invalid(format!("config line {}: expected `key = value`", i + 1))
        })?;
        set_key(&mut out, &key.trim().replace('_', "-"), value.trim())
            .map_err(|msg| CliError::Invalid(format!("config line {}: {msg}", i + 1)))?;
    }
    Ok(out)
}

fn set_key(out: &mut PricingArgs, key: &str, value: &str) -> Result<(), String> {
    let num = || {
        value
            .parse::<f64>()
            .map_err(|_| format!("`{key}` expects a number, got `{value}`"))
    };
    fn choice<T: ValueEnum>(key: &str, value: &str) -> Result<T, String> {
        T::from_str(value, true).map_err(|_| format!("invalid value `{value}` for `{key}`"))
    }
    match key {
        "s0" => out.s0 = Some(num()?),
        "k" => out.k = Some(num()?),
        "t" => out.t = Some(num()?),
        "r" => out.r = Some(num()?),
        "q" => out.q = Some(num()?),
        "sigma" => out.sigma = Some(num()?),
        "eps" => out.eps = Some(num()?),
        "h" => out.h = Some(num()?),
        "lambda" => out.lambda = Some(num()?),
        "mu-j" => out.mu_j = Some(num()?),
        "sigma-j" => out.sigma_j = Some(num()?),
        "kind" => out.kind = Some(choice(key, value)?),
        "avg" => out.avg = Some(choice(key, value)?),
        "fidelity" => out.fidelity = Some(choice(key, value)?),
        "m" => {
            out.m = Some(
                value
                    .parse()
                    .map_err(|_| format!("`m` expects a positive integer, got `{value}`"))?,
            )
        }
        _ => return Err(format!("unknown key `{key}`")),
    }
    Ok(())
}
