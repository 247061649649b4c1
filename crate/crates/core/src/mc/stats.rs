//! Sample moments with deterministic block merging.
//!
//! Each block is reduced with a compensated two-pass pass; blocks are then
//! combined pairwise-exactly (Chan et al.) in block-index order, which makes
//! the final value independent of how blocks were scheduled.

fn compensated_sum(xs: impl Iterator<Item = f64>) -> f64 {
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in xs {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Moments {
    pub n: u64,
    pub mean: f64,
    /// Sum of squared deviations from the mean.
    pub m2: f64,
}

impl Moments {
    pub fn from_slice(xs: &[f64]) -> Self {
        if xs.is_empty() {
            return Self::default();
        }
        let n = xs.len() as f64;
        let rough = compensated_sum(xs.iter().copied()) / n;
        let mean = rough + compensated_sum(xs.iter().map(|&x| x - rough)) / n;
        let m2 = compensated_sum(xs.iter().map(|&x| (x - mean) * (x - mean)));
        Moments {
            n: xs.len() as u64,
            mean,
            m2,
        }
    }

    pub fn merge(self, other: Self) -> Self {
        if self.n == 0 {
            return other;
        }
        if other.n == 0 {
            return self;
        }
        let (na, nb) = (self.n as f64, other.n as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        Moments {
            n: self.n + other.n,
            mean: self.mean + delta * nb / n,
            m2: self.m2 + other.m2 + delta * delta * na * nb / n,
        }
    }

    /// Unbiased sample variance; zero for fewer than two samples.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            (self.m2 / (self.n as f64 - 1.0)).max(0.0)
        }
    }

    pub fn std_error(&self) -> f64 {
        if self.n == 0 {
            return 0.0;
        }
        (self.variance() / self.n as f64).sqrt()
    }
}

/// Joint moments of `(x, y)` for control-variate estimation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PairMoments {
    pub x: Moments,
    pub y: Moments,
    /// Sum of co-deviations.
    pub cxy: f64,
}

impl PairMoments {
    pub fn from_slices(xs: &[f64], ys: &[f64]) -> Self {
        assert_eq!(xs.len(), ys.len());
        let x = Moments::from_slice(xs);
        let y = Moments::from_slice(ys);
        let cxy = compensated_sum(
            xs.iter()
                .zip(ys)
                .map(|(&a, &b)| (a - x.mean) * (b - y.mean)),
        );
        PairMoments { x, y, cxy }
    }

    pub fn merge(self, other: Self) -> Self {
        if self.x.n == 0 {
            return other;
        }
        if other.x.n == 0 {
            return self;
        }
        let (na, nb) = (self.x.n as f64, other.x.n as f64);
        let n = na + nb;
        let dx = other.x.mean - self.x.mean;
        let dy = other.y.mean - self.y.mean;
        PairMoments {
            x: self.x.merge(other.x),
            y: self.y.merge(other.y),
            cxy: self.cxy + other.cxy + dx * dy * na * nb / n,
        }
    }

    /// Control-variate estimate of `E[x]` given the known mean of `y`:
    /// returns `(estimate, std_error)`.
    pub fn control_variate(&self, y_mean: f64) -> (f64, f64) {
        let n = self.x.n as f64;
        if self.x.n < 2 || self.y.m2 <= 0.0 {
            return (self.x.mean, self.x.std_error());
        }
        let beta = self.cxy / self.y.m2;
        let estimate = self.x.mean - beta * (self.y.mean - y_mean);
        let resid = (self.x.m2 - self.cxy * self.cxy / self.y.m2).max(0.0) / (n - 1.0);
        (estimate, (resid / n).sqrt())
    }
}
