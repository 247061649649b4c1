//! Closed-form and Monte Carlo pricing of Asian and Asian power options on an
//! asset driven by a mixed fractional Brownian motion with compound-Poisson
//! log-normal jumps.
//!
//! The crate is organised bottom-up:
//!
//! * [`model`] holds the market/contract types and the per-jump-count term
//!   quantities every formula is built from.
//! * [`special`] provides the normal CDF and truncated Poisson weights.
//! * [`analytic`] evaluates the Poisson-series prices, the adjusted-strike
//!   arithmetic approximation and the arithmetic price bracket.
//! * [`mc`] contains two independent Monte Carlo oracles: a conditional
//!   log-normal sampler and a full path simulator.

pub mod analytic;
pub mod error;
pub mod mc;
pub mod model;
pub mod special;

pub use analytic::{
    approximation_error_bound, arithmetic_bounds, price, price_arithmetic_power_approx,
    price_geometric_power, PriceResult, Warning,
};
pub use error::{PricingError, Result};
pub use mc::{
    conditional_lognormal_oracle, fbm_covariance, mc_price, mc_terminal_spot_mean,
    sample_mixed_paths, FbmGenerator, McConfig, McEstimate, PathBatch,
};
pub use model::{
    adjusted_strike, derive_term_params, jump_moment_rho, mean_arithmetic_power,
    mean_geometric_power, Averaging, Fidelity, ModelParams, OptionContract, OptionKind, TermParams,
};
pub use special::{normal_cdf, normal_pdf, poisson_weights, PoissonWeights, TruncationPolicy};
