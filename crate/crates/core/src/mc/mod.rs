//! Monte Carlo oracles.
//!
//! Two independent engines check the closed forms:
//!
//! * [`conditional_lognormal_oracle`] samples the time-averaged log spot
//!   directly from its conditional Gaussian law, one stratum per jump count.
//!   It converges to the `Consistent` closed forms and isolates algebra errors.
//! * [`mc_price`] simulates whole paths of the jump mixed-fractional dynamics
//!   on a uniform grid and averages them by the trapezoidal rule. It measures
//!   how far the closed forms are from the model they approximate.
//!
//! All randomness is drawn from ChaCha8 substreams keyed by
//! `(seed, block, source)`, so estimates are bit-identical for a fixed seed
//! regardless of the worker count.

mod conditional;
mod fbm;
mod paths;
mod pricing;
mod stats;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{PricingError, Result};

pub use conditional::conditional_lognormal_oracle;
pub use fbm::{fbm_covariance, FractionalNoise};
pub use paths::{sample_mixed_paths, PathBatch, PathSampler};
pub use pricing::{mc_price, mc_terminal_spot_mean};
pub use stats::{Moments, PairMoments};

/// Largest grid for which the Cholesky generator is accepted.
pub const CHOLESKY_MAX_STEPS: usize = 4096;

/// Paths per substream block. Fixed so results do not depend on threading.
pub const BLOCK_PATHS: usize = 1024;

/// Sampler for the fractional Brownian component.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FbmGenerator {
    /// Exact: Cholesky factor of the fBm covariance on the grid.
    Cholesky,
    /// Exact: circulant embedding of fractional Gaussian noise.
    CirculantEmbedding,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub n_paths: usize,
    /// Number of time steps; the grid has `n_steps + 1` points.
    pub n_steps: usize,
    pub seed: u64,
    pub use_control_variate: bool,
    pub generator: FbmGenerator,
    /// Worker threads. Results are identical for any value.
    pub threads: usize,
}

impl McConfig {
    /// Cholesky up to [`CHOLESKY_MAX_STEPS`] steps, circulant embedding beyond.
    pub fn new(n_paths: usize, n_steps: usize, seed: u64) -> Self {
        let generator = if n_steps <= CHOLESKY_MAX_STEPS {
            FbmGenerator::Cholesky
        } else {
            FbmGenerator::CirculantEmbedding
        };
        McConfig {
            n_paths,
            n_steps,
            seed,
            use_control_variate: false,
            generator,
            threads: 1,
        }
    }

    pub fn with_control_variate(mut self, on: bool) -> Self {
        self.use_control_variate = on;
        self
    }

    pub fn with_generator(mut self, generator: FbmGenerator) -> Self {
        self.generator = generator;
        self
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_paths < 1 {
            return Err(PricingError::invalid("n_paths", "must be >= 1"));
        }
        if self.n_steps < 2 {
            return Err(PricingError::invalid("n_steps", "must be >= 2"));
        }
        if self.generator == FbmGenerator::Cholesky && self.n_steps > CHOLESKY_MAX_STEPS {
            return Err(PricingError::invalid(
                "generator",
                format!("cholesky is limited to {CHOLESKY_MAX_STEPS} steps"),
            ));
        }
        if self.threads < 1 {
            return Err(PricingError::invalid("threads", "must be >= 1"));
        }
        Ok(())
    }

    pub(crate) fn n_blocks(&self) -> usize {
        self.n_paths.div_ceil(BLOCK_PATHS)
    }

    pub(crate) fn block_len(&self, block: usize) -> usize {
        BLOCK_PATHS.min(self.n_paths - block * BLOCK_PATHS)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_effective: u64,
    pub seed: u64,
    /// Fractional generator actually used, if the fractional term was simulated.
    pub fbm_generator: Option<FbmGenerator>,
}

impl McEstimate {
    /// `(mean − target) / std_error`; zero when both the error and the gap vanish.
    pub fn z_score(&self, target: f64) -> f64 {
        let gap = self.mean - target;
        if self.std_error > 0.0 {
            gap / self.std_error
        } else if gap == 0.0 {
            0.0
        } else {
            gap.signum() * f64::INFINITY
        }
    }
}

/// Independent randomness sources of one simulation block.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Source {
    Brownian = 0,
    Fractional = 1,
    JumpCount = 2,
    JumpTimes = 3,
    JumpSizes = 4,
    Conditional = 5,
}

pub(crate) fn substream(seed: u64, block: u64, source: Source) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block * 8 + source as u64);
    rng
}

/// Runs `f` over `0..n` on `threads` workers, returning results in index order.
pub(crate) fn ordered_map<T, F>(n: usize, threads: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    if threads <= 1 || n <= 1 {
        return (0..n).map(f).collect();
    }
    use rayon::prelude::*;
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(|| (0..n).into_par_iter().map(&f).collect()),
        Err(_) => (0..n).map(f).collect(),
    }
}
