//! Path-level simulation of the log spot on a uniform grid.

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use rustfft::num_complex::Complex;

use super::fbm::FractionalNoise;
use super::{ordered_map, substream, FbmGenerator, McConfig, Source};
use crate::error::{PricingError, Result};
use crate::model::ModelParams;

/// Simulated log-spot paths.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    /// `0 = t_0 < … < t_M = T`.
    pub grid: Vec<f64>,
    /// Row-major `n_paths × (M + 1)` matrix of `ln S_{t_i}`.
    pub log_spot: Vec<f64>,
    /// Number of jumps in `[0, T]` for each path.
    pub jump_counts: Vec<u32>,
    pub fbm_generator: Option<FbmGenerator>,
}

impl PathBatch {
    pub fn n_paths(&self) -> usize {
        self.jump_counts.len()
    }

    pub fn path(&self, i: usize) -> &[f64] {
        let w = self.grid.len();
        &self.log_spot[i * w..(i + 1) * w]
    }
}

/// Precomputed state for generating blocks of paths.
#[derive(Debug, Clone)]
pub struct PathSampler {
    model: ModelParams,
    maturity: f64,
    grid: Vec<f64>,
    /// Deterministic part of `ln S_{t_i}`.
    drift: Vec<f64>,
    sqrt_dt: f64,
    noise: Option<FractionalNoise>,
    jumps: Option<Poisson<f64>>,
    seed: u64,
}

impl PathSampler {
    pub fn new(model: &ModelParams, maturity: f64, config: &McConfig) -> Result<Self> {
        model.validate()?;
        config.validate()?;
        if !(maturity > 0.0 && maturity.is_finite()) {
            return Err(PricingError::invalid(
                "maturity",
                "must be a finite value > 0",
            ));
        }
        let steps = config.n_steps;
        let dt = maturity / steps as f64;
        let grid: Vec<f64> = (0..=steps)
            .map(|i| if i == steps { maturity } else { i as f64 * dt })
            .collect();
        let ln_s0 = model.s0.ln();
        let two_h = 2.0 * model.hurst;
        let drift = grid
            .iter()
            .map(|&t| {
                ln_s0 + (model.r - model.q) * t
                    - 0.5 * model.sigma * model.sigma * t
                    - 0.5 * model.epsilon * model.epsilon * t.powf(two_h)
            })
            .collect();
        let noise = if model.epsilon > 0.0 {
            Some(FractionalNoise::new(
                config.generator,
                model.hurst,
                maturity,
                steps,
            )?)
        } else {
            None
        };
        let jumps = if model.lambda > 0.0 {
            Some(Poisson::new(model.lambda * maturity).map_err(|e| {
                PricingError::invalid("lambda", format!("poisson intensity rejected: {e}"))
            })?)
        } else {
            None
        };
        Ok(PathSampler {
            model: *model,
            maturity,
            grid,
            drift,
            sqrt_dt: dt.sqrt(),
            noise,
            jumps,
            seed: config.seed,
        })
    }

    pub fn grid(&self) -> &[f64] {
        &self.grid
    }

    pub fn fbm_generator(&self) -> Option<FbmGenerator> {
        self.noise.as_ref().map(FractionalNoise::kind)
    }

    /// Generates `n` paths of block `block` and hands each `(ln S, N_T)` to `visit`.
    pub fn simulate_block(&self, block: usize, n: usize, mut visit: impl FnMut(&[f64], u32)) {
        let block = block as u64;
        let mut bm_rng = substream(self.seed, block, Source::Brownian);
        let mut frac_rng = substream(self.seed, block, Source::Fractional);
        let mut count_rng = substream(self.seed, block, Source::JumpCount);
        let mut time_rng = substream(self.seed, block, Source::JumpTimes);
        let mut size_rng = substream(self.seed, block, Source::JumpSizes);

        let steps = self.grid.len() - 1;
        let m = &self.model;
        let mut log_s = vec![0.0; steps + 1];
        let mut fbm = vec![0.0; steps];
        let mut fbm_spare = vec![0.0; steps];
        let mut have_spare = false;
        let mut scratch: Vec<Complex<f64>> = Vec::new();
        let mut jumps: Vec<(f64, f64)> = Vec::new();

        for _ in 0..n {
            if let Some(noise) = &self.noise {
                if have_spare {
                    std::mem::swap(&mut fbm, &mut fbm_spare);
                    have_spare = false;
                } else if matches!(noise, FractionalNoise::Circulant { .. }) {
                    noise.sample(&mut frac_rng, &mut fbm, Some(&mut fbm_spare), &mut scratch);
                    have_spare = true;
                } else {
                    noise.sample(&mut frac_rng, &mut fbm, None, &mut scratch);
                }
            }

            jumps.clear();
            let count = match &self.jumps {
                Some(dist) => {
                    let c = dist.sample(&mut count_rng) as u32;
                    for _ in 0..c {
                        let t = time_rng.random::<f64>() * self.maturity;
                        let z: f64 = size_rng.sample(StandardNormal);
                        jumps.push((t, m.mu_j + m.sigma_j * z));
                    }
                    jumps.sort_by(|a, b| a.0.total_cmp(&b.0));
                    c
                }
                None => 0,
            };

            log_s[0] = self.drift[0];
            let mut bm = 0.0;
            let mut jump_sum = 0.0;
            let mut next_jump = 0;
            for i in 1..=steps {
                let z: f64 = bm_rng.sample(StandardNormal);
                bm += self.sqrt_dt * z;
                let t = self.grid[i];
                while next_jump < jumps.len() && jumps[next_jump].0 <= t {
                    jump_sum += jumps[next_jump].1;
                    next_jump += 1;
                }
                let frac = if self.noise.is_some() {
                    m.epsilon * fbm[i - 1]
                } else {
                    0.0
                };
                log_s[i] = self.drift[i] + m.sigma * bm + frac + jump_sum;
            }
            visit(&log_s, count);
        }
    }
}

/// Simulates `config.n_paths` paths of `ln S` on `[0, maturity]`.
pub fn sample_mixed_paths(
    model: &ModelParams,
    maturity: f64,
    config: &McConfig,
) -> Result<PathBatch> {
    let sampler = PathSampler::new(model, maturity, config)?;
    let blocks = ordered_map(config.n_blocks(), config.threads, |b| {
        let mut rows = Vec::with_capacity(config.block_len(b) * sampler.grid.len());
        let mut counts = Vec::with_capacity(config.block_len(b));
        sampler.simulate_block(b, config.block_len(b), |path, c| {
            rows.extend_from_slice(path);
            counts.push(c);
        });
        (rows, counts)
    });
    let mut log_spot = Vec::with_capacity(config.n_paths * sampler.grid.len());
    let mut jump_counts = Vec::with_capacity(config.n_paths);
    for (rows, counts) in blocks {
        log_spot.extend(rows);
        jump_counts.extend(counts);
    }
    Ok(PathBatch {
        grid: sampler.grid.clone(),
        log_spot,
        jump_counts,
        fbm_generator: sampler.fbm_generator(),
    })
}
