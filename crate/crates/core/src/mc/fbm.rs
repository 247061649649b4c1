//! Exact samplers for fractional Brownian motion on a uniform grid.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use super::{FbmGenerator, CHOLESKY_MAX_STEPS};
use crate::error::{PricingError, Result};

/// `Cov(B^H_t, B^H_s) = ½(t^{2H} + s^{2H} − |t − s|^{2H})`.
pub fn fbm_covariance(t: f64, s: f64, hurst: f64) -> Result<f64> {
    if !(t >= 0.0 && s >= 0.0) {
        return Err(PricingError::invalid(
            "time",
            "fbm covariance needs t, s >= 0",
        ));
    }
    if !(hurst > 0.0 && hurst < 1.0) {
        return Err(PricingError::invalid("hurst", "must lie in (0, 1)"));
    }
    Ok(cov(t, s, 2.0 * hurst))
}

#[inline]
fn cov(t: f64, s: f64, two_h: f64) -> f64 {
    0.5 * (t.powf(two_h) + s.powf(two_h) - (t - s).abs().powf(two_h))
}

/// Autocovariance of unit-step fractional Gaussian noise at lag `k`.
fn fgn_autocov(k: usize, two_h: f64) -> f64 {
    let k = k as f64;
    0.5 * ((k + 1.0).powf(two_h) - 2.0 * k.powf(two_h) + (k - 1.0).abs().powf(two_h))
}

/// Draws `B^H` at the grid points `h, 2h, …, Mh`.
#[derive(Clone)]
pub enum FractionalNoise {
    Cholesky {
        /// Row-major packed lower-triangular factor.
        factor: Vec<f64>,
        steps: usize,
    },
    Circulant {
        /// `sqrt(λ_k / 2M)` for the embedding's eigenvalues.
        sqrt_eig: Vec<f64>,
        fft: Arc<dyn Fft<f64>>,
        steps: usize,
        /// `h^H`, scales unit-step noise to the grid.
        scale: f64,
    },
}

impl std::fmt::Debug for FractionalNoise {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FractionalNoise")
            .field("kind", &self.kind())
            .field("steps", &self.steps())
            .finish()
    }
}

impl FractionalNoise {
    /// Builds the requested generator. A circulant embedding with negative
    /// eigenvalues falls back to Cholesky when the grid allows it.
    pub fn new(kind: FbmGenerator, hurst: f64, maturity: f64, steps: usize) -> Result<Self> {
        if !(hurst > 0.0 && hurst < 1.0) {
            return Err(PricingError::invalid("hurst", "must lie in (0, 1)"));
        }
        match kind {
            FbmGenerator::Cholesky => Self::cholesky(hurst, maturity, steps),
            FbmGenerator::CirculantEmbedding => match Self::circulant(hurst, maturity, steps) {
                Ok(g) => Ok(g),
                Err(_) if steps <= CHOLESKY_MAX_STEPS => Self::cholesky(hurst, maturity, steps),
                Err(e) => Err(e),
            },
        }
    }

    pub fn kind(&self) -> FbmGenerator {
        match self {
            FractionalNoise::Cholesky { .. } => FbmGenerator::Cholesky,
            FractionalNoise::Circulant { .. } => FbmGenerator::CirculantEmbedding,
        }
    }

    pub fn steps(&self) -> usize {
        match self {
            FractionalNoise::Cholesky { steps, .. } | FractionalNoise::Circulant { steps, .. } => {
                *steps
            }
        }
    }

    fn cholesky(hurst: f64, maturity: f64, steps: usize) -> Result<Self> {
        let h = maturity / steps as f64;
        let two_h = 2.0 * hurst;
        let cov_matrix = DMatrix::from_fn(steps, steps, |i, j| {
            cov((i + 1) as f64 * h, (j + 1) as f64 * h, two_h)
        });
        let scale = cov_matrix.diagonal().max();
        // Near H → 1 the matrix is numerically singular; a relative jitter
        // of ~1e-13 keeps the factorisation exact to working precision.
        let mut chol = None;
        for jitter in [0.0, 1e-14, 1e-13, 1e-12] {
            let mut m = cov_matrix.clone();
            for i in 0..steps {
                m[(i, i)] += jitter * scale;
            }
            if let Some(c) = m.cholesky() {
                chol = Some(c.l());
                break;
            }
        }
        let l = chol.ok_or_else(|| {
            PricingError::Generator("covariance matrix is not positive definite".into())
        })?;
        let mut factor = Vec::with_capacity(steps * (steps + 1) / 2);
        for i in 0..steps {
            for j in 0..=i {
                factor.push(l[(i, j)]);
            }
        }
        Ok(FractionalNoise::Cholesky { factor, steps })
    }

    fn circulant(hurst: f64, maturity: f64, steps: usize) -> Result<Self> {
        let two_h = 2.0 * hurst;
        let size = 2 * steps;
        let mut row: Vec<Complex<f64>> = (0..size)
            .map(|k| {
                let lag = if k <= steps { k } else { size - k };
                Complex::new(fgn_autocov(lag, two_h), 0.0)
            })
            .collect();
        let fft = FftPlanner::new().plan_fft_forward(size);
        fft.process(&mut row);
        let max = row.iter().map(|c| c.re).fold(0.0, f64::max);
        let mut sqrt_eig = Vec::with_capacity(size);
        for c in &row {
            let ev = if c.re < 0.0 && c.re > -1e-10 * max {
                0.0
            } else {
                c.re
            };
            if ev < 0.0 {
                return Err(PricingError::Generator(format!(
                    "circulant embedding has a negative eigenvalue ({ev:e})"
                )));
            }
            sqrt_eig.push((ev / size as f64).sqrt());
        }
        Ok(FractionalNoise::Circulant {
            sqrt_eig,
            fft,
            steps,
            scale: (maturity / steps as f64).powf(hurst),
        })
    }

    /// Fills `out` (length `steps`) with one or two fBm paths. The circulant
    /// sampler produces two independent paths per transform; the second is
    /// written to `spare` when provided.
    pub fn sample<R: Rng>(
        &self,
        rng: &mut R,
        out: &mut [f64],
        spare: Option<&mut [f64]>,
        scratch: &mut Vec<Complex<f64>>,
    ) {
        match self {
            FractionalNoise::Cholesky { factor, steps } => {
                let z: Vec<f64> = (0..*steps).map(|_| rng.sample(StandardNormal)).collect();
                let mut offset = 0;
                for (i, slot) in out.iter_mut().enumerate().take(*steps) {
                    let row = &factor[offset..offset + i + 1];
                    *slot = row.iter().zip(&z).map(|(a, b)| a * b).sum();
                    offset += i + 1;
                }
                if let Some(spare) = spare {
                    self.sample(rng, spare, None, scratch);
                }
            }
            FractionalNoise::Circulant {
                sqrt_eig,
                fft,
                steps,
                scale,
            } => {
                scratch.clear();
                scratch.extend(sqrt_eig.iter().map(|&s| {
                    let re: f64 = rng.sample(StandardNormal);
                    let im: f64 = rng.sample(StandardNormal);
                    Complex::new(s * re, s * im)
                }));
                fft.process(scratch);
                let mut acc = 0.0;
                for (slot, c) in out.iter_mut().zip(scratch.iter()).take(*steps) {
                    acc += scale * c.re;
                    *slot = acc;
                }
                if let Some(spare) = spare {
                    let mut acc = 0.0;
                    for (slot, c) in spare.iter_mut().zip(scratch.iter()).take(*steps) {
                        acc += scale * c.im;
                        *slot = acc;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn diagonal_is_marginal_variance() {
        for h in [0.2, 0.5, 0.8] {
            for t in [0.1, 1.0, 2.5] {
                assert_relative_eq!(
                    fbm_covariance(t, t, h).unwrap(),
                    t.powf(2.0 * h),
                    max_relative = 1e-15
                );
            }
        }
    }

    #[test]
    fn brownian_case_is_min() {
        for (t, s) in [(0.3, 0.7), (1.0, 0.25), (2.0, 2.0)] {
            assert_relative_eq!(
                fbm_covariance(t, s, 0.5).unwrap(),
                f64::min(t, s),
                max_relative = 1e-15
            );
        }
    }

    #[test]
    fn covariance_rejects_bad_inputs() {
        assert!(fbm_covariance(-0.1, 0.2, 0.5).is_err());
        assert!(fbm_covariance(0.1, 0.2, 1.0).is_err());
    }

    #[test]
    fn covariance_matrix_is_positive_semidefinite() {
        let n = 64;
        let m = DMatrix::from_fn(n, n, |i, j| {
            fbm_covariance((i + 1) as f64 / n as f64, (j + 1) as f64 / n as f64, 0.8).unwrap()
        });
        let eig = m.symmetric_eigen();
        let min = eig.eigenvalues.min();
        assert!(min > -1e-12, "min eigenvalue {min}");
    }

    #[test]
    fn circulant_spectrum_is_non_negative() {
        for h in [0.1, 0.3, 0.55, 0.75, 0.9, 0.99] {
            let g = FractionalNoise::new(FbmGenerator::CirculantEmbedding, h, 1.0, 256).unwrap();
            assert_eq!(g.kind(), FbmGenerator::CirculantEmbedding, "H = {h}");
        }
    }

    fn empirical_covariance(kind: FbmGenerator) -> (f64, f64, f64) {
        let steps = 16;
        let g = FractionalNoise::new(kind, 0.8, 1.0, steps).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let (mut a, mut b) = (vec![0.0; steps], vec![0.0; steps]);
        let mut scratch = Vec::new();
        let pairs = 40_000;
        let mut prod = Vec::with_capacity(2 * pairs);
        for _ in 0..pairs {
            g.sample(&mut rng, &mut a, Some(&mut b), &mut scratch);
            prod.push(a[7] * a[15]);
            prod.push(b[7] * b[15]);
        }
        let n = prod.len() as f64;
        let mean = prod.iter().sum::<f64>() / n;
        let var = prod.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / (n - 1.0);
        (
            mean,
            (var / n).sqrt(),
            fbm_covariance(0.5, 1.0, 0.8).unwrap(),
        )
    }

    #[test]
    fn both_generators_reproduce_the_kernel() {
        for kind in [FbmGenerator::Cholesky, FbmGenerator::CirculantEmbedding] {
            let (mean, se, target) = empirical_covariance(kind);
            assert!(
                (mean - target).abs() <= 3.0 * se,
                "{kind:?}: {mean} vs {target} (se {se})"
            );
        }
    }
}
