use std::io::Write;

use mfbm_asian::price;

use crate::format::{format_number, format_optional};
use crate::options::{Axis, Resolved, SweepArgs};
use crate::{build_contract, monte_carlo, CliError, EXIT_OK};

/// `count` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, count: usize) -> Vec<f64> {
    let step = (stop - start) / (count - 1) as f64;
    (0..count)
        .map(|i| {
            if i + 1 == count {
                stop
            } else {
                start + i as f64 * step
            }
        })
        .collect()
}

fn check_range(label: &str, start: f64, stop: f64, count: usize) -> Result<(), CliError> {
    if count < 2 {
        return Err(CliError::Invalid(format!(
            "{label}: count must be >= 2, got {count}"
        )));
    }
    if !(start.is_finite() && stop.is_finite() && start < stop) {
        return Err(CliError::Invalid(format!(
            "{label}: start must be < stop, got {start} and {stop}"
        )));
    }
    Ok(())
}

fn apply(axis: Axis, value: f64, r: &mut Resolved) {
    match axis {
        Axis::Hurst => r.model.hurst = value,
        Axis::SigmaJ => r.model.sigma_j = value,
        Axis::MuJ => r.model.mu_j = value,
        Axis::Strike => r.strike = Some(value),
        Axis::Maturity => r.maturity = Some(value),
    }
}

pub fn run(args: &SweepArgs, out: &mut dyn Write) -> Result<i32, CliError> {
    let base = args.pricing.resolve()?;
    check_range("axis", args.start, args.stop, args.count)?;
    let first = linspace(args.start, args.stop, args.count);
    let second = match args.axis2 {
        None => None,
        Some(axis2) => {
            if axis2 == args.axis {
                return Err(CliError::Invalid("axis2 must differ from axis".into()));
            }
            let (Some(start), Some(stop), Some(count)) = (args.start2, args.stop2, args.count2)
            else {
                return Err(CliError::Invalid(
                    "axis2 requires --start2, --stop2 and --count2".into(),
                ));
            };
            check_range("axis2", start, stop, count)?;
            Some((axis2, linspace(start, stop, count)))
        }
    };

    let mut header = String::from("axis_value");
    if second.is_some() {
        header.push_str(",axis2_value");
    }
    header.push_str(",price,lower_bound,upper_bound,error_bound,series_terms");
    if args.mc.mc_paths > 0 {
        header.push_str(",mc_mean,mc_std_error");
    }

    // Price every point before writing so a bad point leaves no partial table.
    let mut rows = Vec::new();
    for &x in &first {
        let inner: Vec<Option<f64>> = match &second {
            Some((_, ys)) => ys.iter().copied().map(Some).collect(),
            None => vec![None],
        };
        for y in inner {
            let mut r = base;
            apply(args.axis, x, &mut r);
            if let (Some((axis2, _)), Some(y)) = (&second, y) {
                apply(*axis2, y, &mut r);
            }
            let contract = build_contract(&r)?;
            let res = price(&r.model, &contract)?;
            let mut row = format_number(x);
            if let Some(y) = y {
                row.push(',');
                row.push_str(&format_number(y));
            }
            row.push_str(&format!(
                ",{},{},{},{},{}",
                format_number(res.price),
                format_optional(res.lower_bound),
                format_optional(res.upper_bound),
                format_optional(res.error_bound),
                res.series_terms
            ));
            if let Some(est) = monte_carlo(&r, &contract, &args.mc)? {
                row.push_str(&format!(
                    ",{},{}",
                    format_number(est.mean),
                    format_number(est.std_error)
                ));
            }
            rows.push(row);
        }
    }

    writeln!(out, "{header}")?;
    for row in rows {
        writeln!(out, "{row}")?;
    }
    Ok(EXIT_OK)
}
