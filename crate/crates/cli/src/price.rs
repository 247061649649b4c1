use std::io::Write;

use mfbm_asian::{price, PriceResult};
use serde_json::{json, Value};

use crate::format::{format_number, format_optional};
use crate::options::{FormatArg, PriceArgs};
use crate::{build_contract, monte_carlo, CliError, EXIT_OK};

pub const CSV_HEADER: &str =
    "price,lower_bound,upper_bound,error_bound,series_terms,truncated_mass,truncation_bound,warnings";

pub fn run(args: &PriceArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let resolved = args.pricing.resolve()?;
    let contract = build_contract(&resolved)?;
    let result = price(&resolved.model, &contract)?;
    let mc = monte_carlo(&resolved, &contract, &args.mc)?;

    match args.format {
        FormatArg::Json => {
            let mut v = serde_json::to_value(&result).expect("price result serializes");
            if let (Some(est), Value::Object(map)) = (mc, &mut v) {
                map.insert("monte_carlo".into(), json!(est));
            }
            writeln!(out, "{v}")?;
        }
        FormatArg::Csv => {
            let mc_header = if mc.is_some() {
                ",mc_mean,mc_std_error"
            } else {
                ""
            };
            writeln!(out, "{CSV_HEADER}{mc_header}")?;
            write!(out, "{}", csv_row(&result))?;
            if let Some(est) = mc {
                write!(
                    out,
                    ",{},{}",
                    format_number(est.mean),
                    format_number(est.std_error)
                )?;
            }
            writeln!(out)?;
        }
    }
    Ok(EXIT_OK)
}

fn csv_row(r: &PriceResult) -> String {
    let warnings: Vec<String> = r
        .warnings
        .iter()
        .map(|w| {
            serde_json::to_value(w)
                .ok()
                .and_then(|v| v.as_str().map(String::from))
                .unwrap_or_default()
        })
        .collect();
    format!(
        "{},{},{},{},{},{},{},{}",
        format_number(r.price),
        format_optional(r.lower_bound),
        format_optional(r.upper_bound),
        format_optional(r.error_bound),
        r.series_terms,
        format_number(r.truncated_mass),
        format_number(r.truncation_bound),
        warnings.join(";"),
    )
}
