use rand::Rng;
use rand_distr::StandardNormal;

use super::stats::Moments;
use super::{substream, McEstimate, Source};
use crate::error::{PricingError, Result};
use crate::model::{derive_term_params, ModelParams, OptionContract, OptionKind};
use crate::special::{poisson_weights, TruncationPolicy};

/// Every retained jump count gets at least this many draws.
const MIN_STRATUM: usize = 32;
const CHUNK: usize = 4096;

/// Stratified sampler of the conditional log-normal law of the average.
///
/// For each jump count `n` kept by the default truncation policy it draws
/// `L ~ N(μ̂_n, σ̂_n²)` about `n_samples · w_n` times (at least
/// [`MIN_STRATUM`]), evaluates the discounted payoff of `e^{mL}` against the
/// term's effective strike, and combines the stratum means with the Poisson
/// weights. `n_effective` reports the total number of draws.
pub fn conditional_lognormal_oracle(
    model: &ModelParams,
    contract: &OptionContract,
    n_samples: usize,
    seed: u64,
) -> Result<McEstimate> {
    if n_samples < 1 {
        return Err(PricingError::invalid("n_samples", "must be >= 1"));
    }
    model.validate()?;
    contract.validate()?;
    let t = contract.maturity;
    let m = f64::from(contract.power);
    let average_discount = (-model.log_expected_growth(t)).exp();
    let strike_discount = (-model.r * t).exp();
    let pw = poisson_weights(model.lambda * t, &TruncationPolicy::default())?;

    let (mut mean, mut var, mut total) = (0.0, 0.0, 0u64);
    for (n, &w) in pw.weights.iter().enumerate() {
        let term = derive_term_params(model, contract, n as u32)?;
        let discounted_strike = term.effective_strike(contract) * strike_discount;
        let sigma_hat = term.sigma_hat_sq.sqrt();
        let draws = ((n_samples as f64 * w).round() as usize).max(MIN_STRATUM);
        let mut rng = substream(seed, n as u64, Source::Conditional);

        let mut stratum = Moments::default();
        let mut buf = Vec::with_capacity(CHUNK.min(draws));
        let mut left = draws;
        while left > 0 {
            let k = left.min(CHUNK);
            buf.clear();
            for _ in 0..k {
                let z: f64 = rng.sample(StandardNormal);
                let l = term.mu_hat + sigma_hat * z;
                let v = average_discount * (m * l).exp() - discounted_strike;
                buf.push(match contract.kind {
                    OptionKind::Call => v.max(0.0),
                    OptionKind::Put => (-v).max(0.0),
                });
            }
            stratum = stratum.merge(Moments::from_slice(&buf));
            left -= k;
        }
        mean += w * stratum.mean;
        var += w * w * stratum.variance() / stratum.n as f64;
        total += stratum.n;
    }
    Ok(McEstimate {
        mean,
        std_error: var.sqrt(),
        n_effective: total,
        seed,
        fbm_generator: None,
    })
}
