//! Command-line front end for `mfbm-asian`.
//!
//! Exit codes: `0` success, `1` a validation run found a violation, `2`
//! invalid or missing input, `64` unknown flag or malformed command line.

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use mfbm_asian::{McConfig, McEstimate, OptionContract, PricingError};

pub mod format;
pub mod options;
pub mod price;
pub mod sweep;
pub mod validate;

use options::{Cli, Command, McArgs, OracleArg, Resolved};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_USAGE: i32 = 64;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Pricing(#[from] PricingError),
    #[error("missing required parameter `{name}` ({flag})")]
    Missing {
        name: &'static str,
        flag: &'static str,
    },
    #[error("write failed: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => EXIT_VIOLATION,
            _ => EXIT_INVALID,
        }
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    return EXIT_OK;
                }
                ErrorKind::InvalidValue | ErrorKind::ValueValidation => EXIT_INVALID,
                _ => EXIT_USAGE,
            };
            let _ = write!(err, "{}", e.render());
            return code;
        }
    };
    let result = match &cli.command {
        Command::Price(a) => price::run(a, out),
        Command::Sweep(a) => sweep::run(a, out),
        Command::Validate(a) => validate::run(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

pub(crate) fn build_contract(r: &Resolved) -> Result<OptionContract, CliError> {
    let strike = r.strike.ok_or(CliError::Missing {
        name: "strike",
        flag: "--k",
    })?;
    let maturity = r.maturity.ok_or(CliError::Missing {
        name: "maturity",
        flag: "--t",
    })?;
    let contract = OptionContract {
        kind: r.kind,
        strike,
        maturity,
        power: r.power,
        averaging: r.averaging,
        fidelity: r.fidelity,
    };
    r.model.validate()?;
    contract.validate()?;
    Ok(contract)
}

/// Runs the Monte Carlo estimate requested by `mc`, if any.
pub(crate) fn monte_carlo(
    r: &Resolved,
    contract: &OptionContract,
    mc: &McArgs,
) -> Result<Option<McEstimate>, CliError> {
    if mc.mc_paths == 0 {
        return Ok(None);
    }
    let est = match mc.mc_oracle {
        OracleArg::Path => {
            let cfg = McConfig::new(mc.mc_paths, mc.mc_steps, mc.seed)
                .with_control_variate(mc.control_variate)
                .with_threads(mc.threads);
            mfbm_asian::mc_price(&r.model, contract, &cfg)?
        }
        OracleArg::Conditional => {
            mfbm_asian::conditional_lognormal_oracle(&r.model, contract, mc.mc_paths, mc.seed)?
        }
    };
    Ok(Some(est))
}
