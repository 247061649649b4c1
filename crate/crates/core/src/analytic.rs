//! Poisson-series closed forms for geometric and (approximate) arithmetic
//! Asian power options, and the arithmetic price bracket.
//!
//! Every price has the form `Σ_n w_n · V_n`, where `w_n` is the probability of
//! `n` jumps before maturity and `V_n` is a Black–Scholes-like value of the
//! conditionally log-normal average. The average is discounted at the
//! expected return rate `e^{−(r−q)T−λ(ρ−1)T}` and the strike at `e^{−rT}`.

use serde::Serialize;

use crate::error::{PricingError, Result};
use crate::model::{
    derive_term_params, mean_arithmetic_power, mean_geometric_power, Averaging, Fidelity,
    ModelParams, OptionContract, OptionKind, TermParams,
};
use crate::special::{phi, poisson_weights, TruncationPolicy};

/// Diagnostic flags attached to a [`PriceResult`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Warning {
    /// `H ≤ 3/4`, outside the regime where the mixed model is arbitrage-free.
    HurstAtMostThreeQuarters,
    /// Some term had `K' ≤ 0`; exercise was treated as certain there.
    NonpositiveAdjustedStrike,
    /// The series summed to a negative value and the price was floored at zero.
    NegativeRawPrice,
    /// `E[A^m] < E[G^m]` under the selected fidelity, so the bracket is inverted.
    NegativeMeanGap,
    /// The jump-count cap was hit before the tail mass fell below tolerance.
    SeriesCapReached,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PriceResult {
    pub price: f64,
    /// Number of Poisson terms summed (`N + 1`).
    pub series_terms: usize,
    pub truncated_mass: f64,
    /// Upper bound on the value carried by the discarded terms.
    pub truncation_bound: f64,
    pub lower_bound: Option<f64>,
    pub upper_bound: Option<f64>,
    /// `e^{−rT}(E[A^m] − E[G^m])`, arithmetic contracts only.
    pub error_bound: Option<f64>,
    pub warnings: Vec<Warning>,
}

/// One conditional term of a pricing series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTerm {
    pub term: TermParams,
    pub weight: f64,
    pub call: f64,
    pub put: f64,
    /// Discounted forward of the payoff average, `e^{−(r−q)T−λ(ρ−1)T + …}`.
    pub forward: f64,
    /// `K_eff e^{−rT}`.
    pub discounted_strike: f64,
}

impl SeriesTerm {
    pub fn value(&self, kind: OptionKind) -> f64 {
        match kind {
            OptionKind::Call => self.call,
            OptionKind::Put => self.put,
        }
    }
}

/// The evaluated series plus the bookkeeping needed for diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    pub terms: Vec<SeriesTerm>,
    pub truncated_mass: f64,
    pub truncation_bound: f64,
    pub cap_reached: bool,
}

impl Series {
    pub fn raw_value(&self, kind: OptionKind) -> f64 {
        self.terms.iter().map(|t| t.weight * t.value(kind)).sum()
    }
}

fn log_forward(contract: &OptionContract, term: &TermParams) -> f64 {
    let m = f64::from(contract.power);
    let power_moment = m * term.mu_hat + 0.5 * m * m * term.sigma_hat_sq;
    match (contract.averaging, contract.fidelity) {
        (Averaging::Geometric, _) | (Averaging::Arithmetic, Fidelity::Consistent) => power_moment,
        (Averaging::Arithmetic, Fidelity::Paper) => term.mu_hat + 0.5 * term.sigma_hat_sq,
    }
}

fn evaluate_term(model: &ModelParams, contract: &OptionContract, term: TermParams) -> SeriesTerm {
    let t = contract.maturity;
    let m = f64::from(contract.power);
    let forward = (log_forward(contract, &term) - model.log_expected_growth(t)).exp();
    let discounted_strike = term.effective_strike(contract) * (-model.r * t).exp();

    let (call, put) = if term.u <= 0.0 {
        (forward - discounted_strike, 0.0)
    } else {
        let sigma_hat = term.sigma_hat_sq.sqrt();
        let shift = match contract.fidelity {
            Fidelity::Paper => sigma_hat,
            Fidelity::Consistent => m * sigma_hat,
        };
        let moneyness = term.mu_hat - term.u.ln() / m;
        let (d1, d2) = if sigma_hat > 0.0 {
            let d2 = moneyness / sigma_hat;
            (d2 + shift, d2)
        } else {
            // Deterministic average: Φ collapses to the exercise indicator.
            let d = if moneyness > 0.0 {
                f64::INFINITY
            } else if moneyness < 0.0 {
                f64::NEG_INFINITY
            } else {
                0.0
            };
            (d, d)
        };
        (
            forward * phi(d1) - discounted_strike * phi(d2),
            discounted_strike * phi(-d2) - forward * phi(-d1),
        )
    };
    SeriesTerm {
        term,
        weight: 0.0,
        call,
        put,
        forward,
        discounted_strike,
    }
}

/// Evaluates every retained term of the pricing series for `contract`.
pub fn series(
    model: &ModelParams,
    contract: &OptionContract,
    policy: &TruncationPolicy,
) -> Result<Series> {
    model.validate()?;
    contract.validate()?;
    let pw = poisson_weights(model.lambda * contract.maturity, policy)?;
    let mut terms = Vec::with_capacity(pw.len());
    for (n, &w) in pw.weights.iter().enumerate() {
        let tp = derive_term_params(model, contract, n as u32)?;
        terms.push(SeriesTerm {
            weight: w,
            ..evaluate_term(model, contract, tp)
        });
    }
    let truncation_bound = if pw.truncated_mass > 0.0 {
        let next = derive_term_params(model, contract, terms.len() as u32)?;
        let next = evaluate_term(model, contract, next);
        let largest = terms
            .iter()
            .chain(std::iter::once(&next))
            .map(|t| t.forward.max(t.discounted_strike))
            .fold(0.0, f64::max);
        pw.truncated_mass * largest
    } else {
        0.0
    };
    Ok(Series {
        terms,
        truncated_mass: pw.truncated_mass,
        truncation_bound,
        cap_reached: pw.cap_reached,
    })
}

fn base_warnings(model: &ModelParams, series: &Series) -> Vec<Warning> {
    let mut warnings = Vec::new();
    if model.hurst <= 0.75 {
        warnings.push(Warning::HurstAtMostThreeQuarters);
    }
    if series.cap_reached {
        warnings.push(Warning::SeriesCapReached);
    }
    if series
        .terms
        .iter()
        .any(|t| t.term.k_prime.is_some_and(|k| k <= 0.0))
    {
        warnings.push(Warning::NonpositiveAdjustedStrike);
    }
    warnings
}

fn floor_price(raw: f64, series: &Series, warnings: &mut Vec<Warning>) -> f64 {
    if raw >= 0.0 {
        return raw;
    }
    let scale = series
        .terms
        .iter()
        .map(|t| t.weight * t.forward.max(t.discounted_strike))
        .sum::<f64>();
    if raw < -1e-12 * scale {
        warnings.push(Warning::NegativeRawPrice);
    }
    0.0
}

fn result_from_series(
    model: &ModelParams,
    contract: &OptionContract,
    series: &Series,
) -> PriceResult {
    let mut warnings = base_warnings(model, series);
    let price = floor_price(series.raw_value(contract.kind), series, &mut warnings);
    PriceResult {
        price,
        series_terms: series.terms.len(),
        truncated_mass: series.truncated_mass,
        truncation_bound: series.truncation_bound,
        lower_bound: None,
        upper_bound: None,
        error_bound: None,
        warnings,
    }
}

/// Geometric Asian power option, `(G^m − K)^+` or `(K − G^m)^+`.
pub fn price_geometric_power(
    model: &ModelParams,
    contract: &OptionContract,
) -> Result<PriceResult> {
    price_geometric_power_with_policy(model, contract, &TruncationPolicy::default())
}

pub fn price_geometric_power_with_policy(
    model: &ModelParams,
    contract: &OptionContract,
    policy: &TruncationPolicy,
) -> Result<PriceResult> {
    if contract.averaging != Averaging::Geometric {
        return Err(PricingError::WrongAveraging(
            "price_geometric_power requires a geometric-average contract",
        ));
    }
    let s = series(model, contract, policy)?;
    Ok(result_from_series(model, contract, &s))
}

/// `e^{−rT} Σ_n w_n (E[A^m | n] − E[G^m | n])` over the retained terms.
fn mean_gap(model: &ModelParams, contract: &OptionContract, series: &Series) -> f64 {
    let gap: f64 = series
        .terms
        .iter()
        .map(|t| {
            t.weight
                * (mean_arithmetic_power(model, contract, &t.term)
                    - mean_geometric_power(&t.term, contract.power))
        })
        .sum();
    (-model.r * contract.maturity).exp() * gap
}

fn require_arithmetic(contract: &OptionContract, what: &'static str) -> Result<()> {
    if contract.averaging != Averaging::Arithmetic {
        return Err(PricingError::WrongAveraging(what));
    }
    Ok(())
}

/// Bracket for the arithmetic price built from the geometric price at the
/// unadjusted strike: `[C_G, C_G + gap]` for calls, `[P_G − gap, P_G]` for puts.
fn bracket(
    model: &ModelParams,
    contract: &OptionContract,
    policy: &TruncationPolicy,
    gap: f64,
) -> Result<(f64, f64)> {
    let geometric = contract.with_averaging(Averaging::Geometric);
    let g = series(model, &geometric, policy)?
        .raw_value(contract.kind)
        .max(0.0);
    Ok(match contract.kind {
        OptionKind::Call => (g, g + gap),
        OptionKind::Put => (g - gap, g),
    })
}

/// Adjusted-strike approximation of the arithmetic Asian power option.
pub fn price_arithmetic_power_approx(
    model: &ModelParams,
    contract: &OptionContract,
) -> Result<PriceResult> {
    price_arithmetic_power_approx_with_policy(model, contract, &TruncationPolicy::default())
}

pub fn price_arithmetic_power_approx_with_policy(
    model: &ModelParams,
    contract: &OptionContract,
    policy: &TruncationPolicy,
) -> Result<PriceResult> {
    require_arithmetic(
        contract,
        "price_arithmetic_power_approx requires an arithmetic-average contract",
    )?;
    let s = series(model, contract, policy)?;
    let mut result = result_from_series(model, contract, &s);
    let gap = mean_gap(model, contract, &s);
    if gap < 0.0 {
        result.warnings.push(Warning::NegativeMeanGap);
    }
    let (lower, upper) = bracket(model, contract, policy, gap)?;
    result.lower_bound = Some(lower);
    result.upper_bound = Some(upper);
    // Taken from the bracket itself so `upper − lower` reproduces it exactly.
    result.error_bound = Some(upper - lower);
    Ok(result)
}

/// Prices any contract with the default truncation policy.
pub fn price(model: &ModelParams, contract: &OptionContract) -> Result<PriceResult> {
    price_with_policy(model, contract, &TruncationPolicy::default())
}

pub fn price_with_policy(
    model: &ModelParams,
    contract: &OptionContract,
    policy: &TruncationPolicy,
) -> Result<PriceResult> {
    match contract.averaging {
        Averaging::Geometric => price_geometric_power_with_policy(model, contract, policy),
        Averaging::Arithmetic => price_arithmetic_power_approx_with_policy(model, contract, policy),
    }
}

/// `(lower, upper)` bracket for the exact arithmetic price.
pub fn arithmetic_bounds(model: &ModelParams, contract: &OptionContract) -> Result<(f64, f64)> {
    require_arithmetic(
        contract,
        "arithmetic_bounds requires an arithmetic-average contract",
    )?;
    let policy = TruncationPolicy::default();
    let s = series(model, contract, &policy)?;
    bracket(model, contract, &policy, mean_gap(model, contract, &s))
}

/// Bound on `|C̃ − C_A|`: `e^{−rT}(E[A^m] − E[G^m])`.
pub fn approximation_error_bound(model: &ModelParams, contract: &OptionContract) -> Result<f64> {
    require_arithmetic(
        contract,
        "approximation_error_bound requires an arithmetic-average contract",
    )?;
    let (lower, upper) = arithmetic_bounds(model, contract)?;
    Ok(upper - lower)
}
