//! Model and contract types, and the per-jump-count quantities derived from them.
//!
//! Conditional on `n` jumps before maturity, the log of the time-averaged
//! (geometric) spot is Gaussian. [`derive_term_params`] returns its mean and
//! variance together with the drift/variance rates that produce them and the
//! modified exercise threshold used by the closed forms.

use serde::{Deserialize, Serialize};

use crate::error::{PricingError, Result};

/// Market and model parameters of the jump mixed-fractional dynamics.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Spot price at time zero.
    pub s0: f64,
    /// Continuously compounded risk-free rate.
    pub r: f64,
    /// Continuous dividend yield.
    pub q: f64,
    /// Volatility of the Brownian component.
    pub sigma: f64,
    /// Coefficient of the fractional Brownian component.
    pub epsilon: f64,
    /// Hurst exponent of the fractional component, in (0, 1).
    pub hurst: f64,
    /// Poisson jump intensity per year.
    pub lambda: f64,
    /// Mean of the log jump size.
    pub mu_j: f64,
    /// Standard deviation of the log jump size.
    pub sigma_j: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            s0: 100.0,
            r: 0.05,
            q: 0.0,
            sigma: 0.2,
            epsilon: 0.0,
            hurst: 0.5,
            lambda: 0.0,
            mu_j: 0.0,
            sigma_j: 0.0,
        }
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(PricingError::invalid(
            name,
            format!("must be finite, got {v}"),
        ))
    }
}

fn non_negative(name: &'static str, v: f64) -> Result<()> {
    finite(name, v)?;
    if v < 0.0 {
        return Err(PricingError::invalid(
            name,
            format!("must be >= 0, got {v}"),
        ));
    }
    Ok(())
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        finite("s0", self.s0)?;
        if self.s0 <= 0.0 {
            return Err(PricingError::invalid(
                "s0",
                format!("must be > 0, got {}", self.s0),
            ));
        }
        finite("r", self.r)?;
        finite("q", self.q)?;
        non_negative("sigma", self.sigma)?;
        non_negative("epsilon", self.epsilon)?;
        finite("hurst", self.hurst)?;
        if !(self.hurst > 0.0 && self.hurst < 1.0) {
            return Err(PricingError::invalid(
                "hurst",
                format!("must lie in (0, 1), got {}", self.hurst),
            ));
        }
        non_negative("lambda", self.lambda)?;
        finite("mu_j", self.mu_j)?;
        non_negative("sigma_j", self.sigma_j)?;
        Ok(())
    }

    /// `E[e^J]` for the log-normal jump size.
    pub fn rho(&self) -> Result<f64> {
        jump_moment_rho(self.mu_j, self.sigma_j)
    }

    /// `ln(E[S_t]/S0) = (r − q)t + λ(ρ − 1)t`, the integrated expected return
    /// rate. Its negative exponential discounts the average in every payoff.
    pub fn log_expected_growth(&self, t: f64) -> f64 {
        let rho = (self.mu_j + 0.5 * self.sigma_j * self.sigma_j).exp();
        (self.r - self.q) * t + self.lambda * (rho - 1.0) * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OptionKind {
    Call,
    Put,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Averaging {
    Geometric,
    Arithmetic,
}

/// How literally the closed forms are evaluated.
///
/// `Paper` evaluates the reference formulas as stated, including the power-option
/// `d1 = d2 + σ̂` shift and the arithmetic power mean that omits the
/// `½m(m−1)σ_n²` growth term. `Consistent` uses `d1 = d2 + mσ̂`, the full
/// power mean, and the `m`-th moment of `G` in the arithmetic power forward;
/// in that mode every price equals the expectation of its payoff under the
/// conditional log-normal law. The two modes agree for `m = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Fidelity {
    #[default]
    Paper,
    Consistent,
}

/// Payoff description of an Asian (power) option.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptionContract {
    pub kind: OptionKind,
    pub strike: f64,
    /// Years to maturity; the averaging window is `[0, maturity]`.
    pub maturity: f64,
    /// Power `m` applied to the average.
    pub power: u32,
    pub averaging: Averaging,
    pub fidelity: Fidelity,
}

impl OptionContract {
    /// Geometric-average call with power 1 in `Paper` fidelity.
    pub fn call(strike: f64, maturity: f64) -> Self {
        OptionContract {
            kind: OptionKind::Call,
            strike,
            maturity,
            power: 1,
            averaging: Averaging::Geometric,
            fidelity: Fidelity::Paper,
        }
    }

    /// Geometric-average put with power 1 in `Paper` fidelity.
    pub fn put(strike: f64, maturity: f64) -> Self {
        OptionContract {
            kind: OptionKind::Put,
            ..Self::call(strike, maturity)
        }
    }

    pub fn with_kind(mut self, kind: OptionKind) -> Self {
        self.kind = kind;
        self
    }

    pub fn with_power(mut self, power: u32) -> Self {
        self.power = power;
        self
    }

    pub fn with_averaging(mut self, averaging: Averaging) -> Self {
        self.averaging = averaging;
        self
    }

    pub fn with_fidelity(mut self, fidelity: Fidelity) -> Self {
        self.fidelity = fidelity;
        self
    }

    pub fn with_strike(mut self, strike: f64) -> Self {
        self.strike = strike;
        self
    }

    pub fn validate(&self) -> Result<()> {
        non_negative("strike", self.strike)?;
        finite("maturity", self.maturity)?;
        if self.maturity <= 0.0 {
            return Err(PricingError::invalid(
                "maturity",
                format!("must be > 0, got {}", self.maturity),
            ));
        }
        if self.power < 1 {
            return Err(PricingError::invalid("power", "must be an integer >= 1"));
        }
        Ok(())
    }
}

/// Quantities of the pricing series conditional on `n` jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TermParams {
    pub n: u32,
    /// Effective drift `r − q + (n/T)(μ_J + σ_J²/2)`.
    pub r_n: f64,
    /// Effective variance rate `σ² + (ε²T^{2H} + nσ_J²)/T`.
    pub sigma_n_sq: f64,
    /// Mean of the time-averaged log spot.
    pub mu_hat: f64,
    /// Variance of the time-averaged log spot, `σ_n² T / 3`.
    pub sigma_hat_sq: f64,
    pub rho: f64,
    /// Exercise threshold for `G^m`: `K_eff · e^{−qT − (1−ρ)λT}`.
    pub u: f64,
    /// Adjusted strike; only set for arithmetic averaging.
    pub k_prime: Option<f64>,
}

impl TermParams {
    /// The strike the series is evaluated against (`K'` for arithmetic contracts).
    pub fn effective_strike(&self, contract: &OptionContract) -> f64 {
        self.k_prime.unwrap_or(contract.strike)
    }
}

/// `E[e^J] = exp(μ_J + σ_J²/2)`.
pub fn jump_moment_rho(mu_j: f64, sigma_j: f64) -> Result<f64> {
    finite("mu_j", mu_j)?;
    non_negative("sigma_j", sigma_j)?;
    Ok((mu_j + 0.5 * sigma_j * sigma_j).exp())
}

/// `(e^x − 1)/x` with its removable singularity at zero filled in.
pub(crate) fn exprel(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 + x / 2.0 + x * x / 6.0
    } else {
        x.exp_m1() / x
    }
}

pub fn derive_term_params(
    model: &ModelParams,
    contract: &OptionContract,
    n: u32,
) -> Result<TermParams> {
    model.validate()?;
    contract.validate()?;
    let t = contract.maturity;
    let nf = f64::from(n);
    let rho = jump_moment_rho(model.mu_j, model.sigma_j)?;

    let r_n = model.r - model.q + nf / t * (model.mu_j + 0.5 * model.sigma_j * model.sigma_j);
    let frac = model.epsilon * model.epsilon * t.powf(2.0 * model.hurst);
    let sigma_n_sq = model.sigma * model.sigma + (frac + nf * model.sigma_j * model.sigma_j) / t;
    let mu_hat = model.s0.ln() + 0.5 * (r_n - 0.5 * sigma_n_sq) * t;
    let sigma_hat_sq = sigma_n_sq * t / 3.0;

    let mut term = TermParams {
        n,
        r_n,
        sigma_n_sq,
        mu_hat,
        sigma_hat_sq,
        rho,
        u: 0.0,
        k_prime: None,
    };
    if contract.averaging == Averaging::Arithmetic {
        term.k_prime = Some(adjusted_strike(model, contract, &term));
    }
    let k_eff = term.effective_strike(contract);
    term.u = k_eff * (-model.q * t - (1.0 - rho) * model.lambda * t).exp();
    Ok(term)
}

/// `E[G^m] = exp(mμ̂ + ½m²σ̂²)` conditional on the term's jump count.
pub fn mean_geometric_power(term: &TermParams, m: u32) -> f64 {
    let m = f64::from(m);
    (m * term.mu_hat + 0.5 * m * m * term.sigma_hat_sq).exp()
}

/// Mean of the `m`-th power of the arithmetic average, conditional on the
/// term's jump count, as `(S0^m/T)∫₀ᵀ e^{a t} dt`.
///
/// `Paper` uses `a = m r_n`; `Consistent` uses `a = m r_n + ½m(m−1)σ_n²`.
pub fn mean_arithmetic_power(
    model: &ModelParams,
    contract: &OptionContract,
    term: &TermParams,
) -> f64 {
    let m = f64::from(contract.power);
    let growth = match contract.fidelity {
        Fidelity::Paper => m * term.r_n,
        Fidelity::Consistent => m * term.r_n + 0.5 * m * (m - 1.0) * term.sigma_n_sq,
    };
    model.s0.powi(contract.power as i32) * exprel(growth * contract.maturity)
}

/// Adjusted strike `K' = K + E[G^m] − E[A^m]`. May be non-positive.
pub fn adjusted_strike(model: &ModelParams, contract: &OptionContract, term: &TermParams) -> f64 {
    contract.strike + mean_geometric_power(term, contract.power)
        - mean_arithmetic_power(model, contract, term)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn base() -> ModelParams {
        ModelParams::default()
    }

    #[test]
    fn rho_trivial_values() {
        assert_eq!(jump_moment_rho(0.0, 0.0).unwrap(), 1.0);
        assert_eq!(jump_moment_rho(0.1, 0.0).unwrap(), 0.1f64.exp());
        assert_relative_eq!(
            jump_moment_rho(-0.1, 0.2).unwrap(),
            (-0.08f64).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn rho_rejects_non_finite_and_negative_sigma() {
        assert!(jump_moment_rho(f64::NAN, 0.1).is_err());
        assert!(jump_moment_rho(0.0, f64::INFINITY).is_err());
        assert!(jump_moment_rho(0.0, -0.1).is_err());
    }

    #[test]
    fn term_params_without_jumps_or_fractional_part() {
        let c = OptionContract::call(100.0, 1.0);
        let tp = derive_term_params(&base(), &c, 0).unwrap();
        assert_relative_eq!(tp.r_n, 0.05, max_relative = 1e-15);
        assert_relative_eq!(tp.sigma_n_sq, 0.04, max_relative = 1e-15);
        assert_relative_eq!(
            tp.mu_hat,
            100f64.ln() + 0.5 * (0.05 - 0.02),
            max_relative = 1e-15
        );
        assert_relative_eq!(tp.sigma_hat_sq, 0.04 / 3.0, max_relative = 1e-15);
        assert_eq!(tp.k_prime, None);
        assert_relative_eq!(tp.u, 100.0, max_relative = 1e-15);
    }

    #[test]
    fn brownian_hurst_collapses_fractional_variance() {
        let m = ModelParams {
            epsilon: 0.1,
            hurst: 0.5,
            ..base()
        };
        let tp = derive_term_params(&m, &OptionContract::call(100.0, 1.0), 0).unwrap();
        assert_relative_eq!(tp.sigma_n_sq, 0.05, max_relative = 1e-15);
    }

    #[test]
    fn term_params_with_jumps_match_reference_evaluation() {
        // Reference values from a 40-digit evaluation of the same formulas.
        let m = ModelParams {
            s0: 100.0,
            r: 0.05,
            q: 0.01,
            sigma: 0.2,
            epsilon: 0.1,
            hurst: 0.8,
            lambda: 0.5,
            mu_j: -0.1,
            sigma_j: 0.2,
        };
        let c = OptionContract::call(100.0, 2.0);
        let tp = derive_term_params(&m, &c, 2).unwrap();
        assert_relative_eq!(tp.rho, 0.923_116_346_386_635_8, max_relative = 1e-14);
        assert_relative_eq!(tp.r_n, -0.04, max_relative = 1e-13);
        assert_relative_eq!(
            tp.sigma_n_sq,
            0.095_157_165_665_103_98,
            max_relative = 1e-14
        );
        assert_relative_eq!(tp.mu_hat, 4.517_591_603_155_539, max_relative = 1e-14);
        assert_relative_eq!(
            tp.sigma_hat_sq,
            0.063_438_110_443_402_65,
            max_relative = 1e-14
        );
        assert_relative_eq!(tp.u, 90.766_160_313_805_17, max_relative = 1e-14);

        let ca = c.with_averaging(Averaging::Arithmetic);
        let ta = derive_term_params(&m, &ca, 2).unwrap();
        assert_relative_eq!(
            ta.k_prime.unwrap(),
            98.462_629_719_415_49,
            max_relative = 1e-13
        );
    }

    #[test]
    fn sigma_hat_sq_is_exactly_a_third() {
        let m = ModelParams {
            epsilon: 0.3,
            hurst: 0.7,
            lambda: 1.0,
            sigma_j: 0.4,
            ..base()
        };
        for n in 0..6 {
            let tp = derive_term_params(&m, &OptionContract::call(90.0, 1.7), n).unwrap();
            assert_eq!(tp.sigma_hat_sq, tp.sigma_n_sq * 1.7 / 3.0);
            assert!(tp.sigma_n_sq >= m.sigma * m.sigma);
        }
    }

    #[test]
    fn rejects_non_positive_maturity() {
        let c = OptionContract::call(100.0, 0.0);
        assert!(matches!(
            derive_term_params(&base(), &c, 0),
            Err(PricingError::InvalidParameter {
                name: "maturity",
                ..
            })
        ));
    }

    #[test]
    fn geometric_mean_trivial() {
        let tp = TermParams {
            n: 0,
            r_n: 0.0,
            sigma_n_sq: 0.0,
            mu_hat: 0.0,
            sigma_hat_sq: 0.0,
            rho: 1.0,
            u: 0.0,
            k_prime: None,
        };
        assert_eq!(mean_geometric_power(&tp, 1), 1.0);
        let tp = TermParams {
            mu_hat: 4.6,
            sigma_hat_sq: 0.0133,
            ..tp
        };
        assert_relative_eq!(
            mean_geometric_power(&tp, 1),
            (4.6f64 + 0.00665).exp(),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            mean_geometric_power(&tp, 2),
            (9.2f64 + 0.0266).exp(),
            max_relative = 1e-15
        );
    }

    #[test]
    fn arithmetic_mean_zero_drift_limit() {
        let m = ModelParams {
            r: 0.03,
            q: 0.03,
            ..base()
        };
        for power in 1..=3 {
            let c = OptionContract::call(100.0, 1.0)
                .with_power(power)
                .with_averaging(Averaging::Arithmetic);
            let tp = derive_term_params(&m, &c, 0).unwrap();
            assert_eq!(tp.r_n, 0.0);
            assert_relative_eq!(
                mean_arithmetic_power(&m, &c, &tp),
                100f64.powi(power as i32),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn consistent_power_mean_exceeds_paper() {
        let c = OptionContract::call(100.0, 1.0)
            .with_power(2)
            .with_averaging(Averaging::Arithmetic);
        let tp = derive_term_params(&base(), &c, 0).unwrap();
        let paper = mean_arithmetic_power(&base(), &c, &tp);
        let cons = mean_arithmetic_power(&base(), &c.with_fidelity(Fidelity::Consistent), &tp);
        assert!(cons > paper);
        // m = 1: both modes go through the same expression.
        let c1 = c.with_power(1);
        assert_eq!(
            mean_arithmetic_power(&base(), &c1, &tp),
            mean_arithmetic_power(&base(), &c1.with_fidelity(Fidelity::Consistent), &tp)
        );
    }

    #[test]
    fn adjusted_strike_for_deterministic_path() {
        let m = ModelParams {
            sigma: 0.0,
            r: 0.07,
            q: 0.02,
            ..base()
        };
        let c = OptionContract::call(95.0, 1.5).with_averaging(Averaging::Arithmetic);
        let tp = derive_term_params(&m, &c, 0).unwrap();
        let g = 0.05 * 1.5;
        let expected = 95.0 + 100.0 * (g / 2.0f64).exp() - 100.0 * g.exp_m1() / g;
        assert_relative_eq!(tp.k_prime.unwrap(), expected, max_relative = 1e-14);
    }

    #[test]
    fn adjusted_strike_is_identity_when_means_coincide() {
        let m = ModelParams {
            sigma: 0.0,
            r: 0.04,
            q: 0.04,
            ..base()
        };
        let c = OptionContract::call(110.0, 1.0).with_averaging(Averaging::Arithmetic);
        let tp = derive_term_params(&m, &c, 0).unwrap();
        assert_relative_eq!(tp.k_prime.unwrap(), 110.0, max_relative = 1e-14);
    }

    #[test]
    fn model_validation_names_the_field() {
        let bad = [
            ModelParams { s0: 0.0, ..base() },
            ModelParams {
                sigma: -0.1,
                ..base()
            },
            ModelParams {
                epsilon: -1.0,
                ..base()
            },
            ModelParams {
                hurst: 1.0,
                ..base()
            },
            ModelParams {
                hurst: 0.0,
                ..base()
            },
            ModelParams {
                lambda: -0.5,
                ..base()
            },
            ModelParams {
                sigma_j: -0.2,
                ..base()
            },
            ModelParams {
                r: f64::NAN,
                ..base()
            },
        ];
        let names = [
            "s0", "sigma", "epsilon", "hurst", "hurst", "lambda", "sigma_j", "r",
        ];
        for (m, expected) in bad.iter().zip(names) {
            match m.validate() {
                Err(PricingError::InvalidParameter { name, .. }) => assert_eq!(name, expected),
                other => panic!("expected failure on {expected}, got {other:?}"),
            }
        }
    }

    #[test]
    fn exprel_is_continuous_across_branch() {
        for x in [9.9e-9, 1.01e-8, -9.9e-9, -1.01e-8] {
            assert_relative_eq!(exprel(x), 1.0 + x / 2.0, max_relative = 1e-15);
        }
    }
}
