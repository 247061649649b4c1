//! Scalar kernels: the standard normal distribution and truncated Poisson weights.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{PricingError, Result};

/// Standard normal CDF without input checks. NaN propagates.
#[inline]
pub(crate) fn phi(x: f64) -> f64 {
    // erfc keeps full relative accuracy in the lower tail.
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// Standard normal cumulative distribution function.
///
/// Accepts `±∞`; rejects NaN.
pub fn normal_cdf(x: f64) -> Result<f64> {
    if x.is_nan() {
        return Err(PricingError::invalid("x", "normal_cdf argument is NaN"));
    }
    Ok(phi(x))
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// Controls where the infinite jump-count series is cut.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationPolicy {
    /// Upper bound on the Poisson mass left out of the series.
    pub mass_tol: f64,
    /// Relative floor (scaled by `mass_tol`) below which tail terms are no
    /// longer accumulated when measuring the discarded mass.
    pub term_tol: f64,
    /// Hard maximum jump count kept in the series.
    pub n_cap: u32,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy {
            mass_tol: 1e-12,
            term_tol: 1e-13,
            n_cap: 512,
        }
    }
}

impl TruncationPolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.mass_tol > 0.0 && self.mass_tol.is_finite()) {
            return Err(PricingError::invalid(
                "mass_tol",
                "must be a finite value > 0",
            ));
        }
        if !(self.term_tol > 0.0 && self.term_tol.is_finite()) {
            return Err(PricingError::invalid(
                "term_tol",
                "must be a finite value > 0",
            ));
        }
        if self.n_cap < 1 {
            return Err(PricingError::invalid("n_cap", "must be >= 1"));
        }
        Ok(())
    }
}

/// Poisson probabilities `w_0..=w_N` and the mass beyond `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PoissonWeights {
    pub weights: Vec<f64>,
    pub truncated_mass: f64,
    /// True when `n_cap` stopped the series before `mass_tol` was met.
    pub cap_reached: bool,
}

impl PoissonWeights {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

// Tail terms beyond this many indices past the cap are summarised as 1 − head.
const TAIL_SCAN_LIMIT: u64 = 1 << 20;

/// `ln n! − ln(√(2πn)(n/e)^n)` for n = 0..=15.
#[allow(clippy::excessive_precision)]
const STIRLING_ERROR: [f64; 16] = [
    0.0,
    0.081_061_466_795_327_258_22,
    0.041_340_695_955_409_294_09,
    0.027_677_925_684_998_339_15,
    0.020_790_672_103_765_093_11,
    0.016_644_691_189_821_192_16,
    0.013_876_128_823_070_748_00,
    0.011_896_709_945_891_770_10,
    0.010_411_265_261_972_096_50,
    0.009_255_462_182_712_732_918,
    0.008_330_563_433_362_871_257,
    0.007_573_675_487_951_840_795,
    0.006_942_840_107_209_529_866,
    0.006_408_994_188_004_207_068,
    0.005_951_370_112_758_847_736,
    0.005_554_733_551_962_801_371,
];

fn stirling_error(n: u64) -> f64 {
    const S0: f64 = 1.0 / 12.0;
    const S1: f64 = 1.0 / 360.0;
    const S2: f64 = 1.0 / 1260.0;
    const S3: f64 = 1.0 / 1680.0;
    const S4: f64 = 1.0 / 1188.0;
    if n < 16 {
        return STIRLING_ERROR[n as usize];
    }
    let x = n as f64;
    let xx = x * x;
    if n > 500 {
        (S0 - S1 / xx) / x
    } else if n > 80 {
        (S0 - (S1 - S2 / xx) / xx) / x
    } else if n > 35 {
        (S0 - (S1 - (S2 - S3 / xx) / xx) / xx) / x
    } else {
        (S0 - (S1 - (S2 - (S3 - S4 / xx) / xx) / xx) / xx) / x
    }
}

/// Deviance term `x ln(x/μ) + μ − x`, summed as a series near `x = μ`.
fn deviance(x: f64, mu: f64) -> f64 {
    if (x - mu).abs() < 0.1 * (x + mu) {
        let v = (x - mu) / (x + mu);
        let v2 = v * v;
        let mut s = (x - mu) * v;
        let mut ej = 2.0 * x * v;
        for j in 1..1000 {
            ej *= v2;
            let next = s + ej / f64::from(2 * j + 1);
            if next == s {
                return next;
            }
            s = next;
        }
        s
    } else {
        x * (x / mu).ln() + mu - x
    }
}

/// `ln w_n = n ln(λT) − λT − ln n!`, arranged as
/// `−stirling_error(n) − deviance(n, λT) − ½ ln(2πn)` so the large terms
/// cancel analytically instead of in floating point.
fn log_poisson(n: u64, lambda_t: f64) -> f64 {
    if n == 0 {
        return -lambda_t;
    }
    let x = n as f64;
    -stirling_error(n) - deviance(x, lambda_t) - 0.5 * (2.0 * PI * x).ln()
}

/// Poisson(`lambda_t`) weights computed in log space, truncated by tail mass.
///
/// `N` is the smallest index whose discarded tail is at most `mass_tol`,
/// capped at `n_cap`. The discarded tail is summed explicitly, smallest terms
/// first, rather than taken as `1 − Σw`.
pub fn poisson_weights(lambda_t: f64, policy: &TruncationPolicy) -> Result<PoissonWeights> {
    policy.validate()?;
    if !lambda_t.is_finite() || lambda_t < 0.0 {
        return Err(PricingError::invalid(
            "lambda_t",
            format!("must be a finite value >= 0, got {lambda_t}"),
        ));
    }
    if lambda_t == 0.0 {
        return Ok(PoissonWeights {
            weights: vec![1.0],
            truncated_mass: 0.0,
            cap_reached: false,
        });
    }

    let mode = lambda_t.floor() as u64;
    let n_cap = u64::from(policy.n_cap);
    let floor = policy.term_tol * policy.mass_tol;
    let scan_limit = n_cap + TAIL_SCAN_LIMIT;

    let mut all = Vec::new();
    let mut n = 0u64;
    let mut exhausted = true;
    loop {
        let w = log_poisson(n, lambda_t).exp();
        all.push(w);
        if n > mode && w < floor {
            break;
        }
        n += 1;
        if n > scan_limit {
            exhausted = false;
            break;
        }
    }

    // suffix[k] = Σ_{j ≥ k} w_j, accumulated from the small end.
    let mut suffix = vec![0.0; all.len() + 1];
    for k in (0..all.len()).rev() {
        suffix[k] = suffix[k + 1] + all[k];
    }

    let cut =
        (0..=n_cap.min(all.len() as u64 - 1) as usize).find(|&k| suffix[k + 1] <= policy.mass_tol);
    let (last, cap_reached) = match cut {
        Some(k) => (k, false),
        None => (n_cap as usize, true),
    };

    let weights: Vec<f64> = all.iter().take(last + 1).copied().collect();
    let truncated_mass = if exhausted {
        suffix.get(last + 1).copied().unwrap_or(0.0)
    } else {
        let head: f64 = weights.iter().sum();
        (1.0 - head).max(0.0)
    };
    Ok(PoissonWeights {
        weights,
        truncated_mass,
        cap_reached,
    })
}
