use super::paths::PathSampler;
use super::stats::{Moments, PairMoments};
use super::{ordered_map, McConfig, McEstimate};
use crate::analytic::price_geometric_power;
use crate::error::Result;
use crate::model::{Averaging, Fidelity, ModelParams, OptionContract, OptionKind};

/// Trapezoidal time average of `f(xs)` over a uniform grid.
fn trapezoid_mean_of(xs: &[f64], f: impl Fn(f64) -> f64) -> f64 {
    let steps = xs.len() - 1;
    let inner: f64 = xs[1..steps].iter().map(|&x| f(x)).sum();
    (0.5 * (f(xs[0]) + f(xs[steps])) + inner) / steps as f64
}

fn trapezoid_mean(xs: &[f64]) -> f64 {
    trapezoid_mean_of(xs, |x| x)
}

struct Payoff {
    kind: OptionKind,
    power: i32,
    /// `e^{−(r−q)T−λ(ρ−1)T}`, applied to the average.
    average_discount: f64,
    /// `K e^{−rT}`.
    discounted_strike: f64,
}

impl Payoff {
    fn apply(&self, average: f64) -> f64 {
        let v = self.average_discount * average.powi(self.power) - self.discounted_strike;
        match self.kind {
            OptionKind::Call => v.max(0.0),
            OptionKind::Put => (-v).max(0.0),
        }
    }
}

/// Path-level Monte Carlo price of an Asian power option.
///
/// Geometric averages use `exp` of the trapezoidal mean of `ln S`; arithmetic
/// averages use the trapezoidal mean of `S`. With `use_control_variate` on an
/// arithmetic contract, the geometric payoff on the same path is the control
/// and its closed-form (`Consistent`) price is the control mean. That mean is
/// exact only for `λ = 0, ε = 0`; elsewhere it biases the estimate by the
/// closed form's model error.
pub fn mc_price(
    model: &ModelParams,
    contract: &OptionContract,
    config: &McConfig,
) -> Result<McEstimate> {
    contract.validate()?;
    let sampler = PathSampler::new(model, contract.maturity, config)?;
    let t = contract.maturity;
    let payoff = Payoff {
        kind: contract.kind,
        power: contract.power as i32,
        average_discount: (-model.log_expected_growth(t)).exp(),
        discounted_strike: contract.strike * (-model.r * t).exp(),
    };
    let with_control = config.use_control_variate && contract.averaging == Averaging::Arithmetic;

    let blocks = ordered_map(config.n_blocks(), config.threads, |b| {
        let n = config.block_len(b);
        let mut target = Vec::with_capacity(n);
        let mut control = Vec::with_capacity(if with_control { n } else { 0 });
        sampler.simulate_block(b, n, |log_s, _| {
            let geometric = || payoff.apply(trapezoid_mean(log_s).exp());
            match contract.averaging {
                Averaging::Geometric => target.push(geometric()),
                Averaging::Arithmetic => {
                    target.push(payoff.apply(trapezoid_mean_of(log_s, f64::exp)));
                    if with_control {
                        control.push(geometric());
                    }
                }
            }
        });
        if with_control {
            PairMoments::from_slices(&target, &control)
        } else {
            PairMoments {
                x: Moments::from_slice(&target),
                ..Default::default()
            }
        }
    });
    let merged = blocks
        .into_iter()
        .fold(PairMoments::default(), PairMoments::merge);

    let (mean, std_error) = if with_control {
        let geometric = contract
            .with_averaging(Averaging::Geometric)
            .with_fidelity(Fidelity::Consistent);
        let control_mean = price_geometric_power(model, &geometric)?.price;
        merged.control_variate(control_mean)
    } else {
        (merged.x.mean, merged.x.std_error())
    };
    Ok(McEstimate {
        mean,
        std_error,
        n_effective: merged.x.n,
        seed: config.seed,
        fbm_generator: sampler.fbm_generator(),
    })
}

/// Sample mean of the simulated terminal spot `S_T`.
pub fn mc_terminal_spot_mean(
    model: &ModelParams,
    maturity: f64,
    config: &McConfig,
) -> Result<McEstimate> {
    let sampler = PathSampler::new(model, maturity, config)?;
    let blocks = ordered_map(config.n_blocks(), config.threads, |b| {
        let mut terminal = Vec::with_capacity(config.block_len(b));
        sampler.simulate_block(b, config.block_len(b), |log_s, _| {
            terminal.push(log_s[log_s.len() - 1].exp());
        });
        Moments::from_slice(&terminal)
    });
    let m = blocks.into_iter().fold(Moments::default(), Moments::merge);
    Ok(McEstimate {
        mean: m.mean,
        std_error: m.std_error(),
        n_effective: m.n,
        seed: config.seed,
        fbm_generator: sampler.fbm_generator(),
    })
}
