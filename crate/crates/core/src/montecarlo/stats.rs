use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    /// Sample standard deviation over √n; infinite when fewer than two
    /// samples were drawn.
    pub stderr: f64,
    pub n_samples: u64,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64]) -> Self {
        let mut acc = Accumulator::default();
        for &x in samples {
            acc.push(x);
        }
        acc.estimate()
    }

    /// Number of standard errors separating the estimate from `value`.
    pub fn z_score(&self, value: f64) -> f64 {
        (self.mean - value) / self.stderr
    }

    pub fn relative_error(&self, value: f64) -> f64 {
        (self.mean - value).abs() / value.abs()
    }

    /// Combines estimates from independent runs, weighting by sample count.
    pub fn pool(estimates: &[McEstimate]) -> Self {
        let n: u64 = estimates.iter().map(|e| e.n_samples).sum();
        if n == 0 {
            return McEstimate {
                mean: f64::NAN,
                stderr: f64::INFINITY,
                n_samples: 0,
            };
        }
        let weight = |e: &McEstimate| e.n_samples as f64 / n as f64;
        let used = || estimates.iter().filter(|e| e.n_samples > 0);
        McEstimate {
            mean: used().map(|e| weight(e) * e.mean).sum(),
            stderr: used().map(|e| (weight(e) * e.stderr).powi(2)).sum::<f64>().sqrt(),
            n_samples: n,
        }
    }
}

/// Streaming mean and variance (Welford updates, Chan merges).
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct Accumulator {
    n: u64,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn merge(&mut self, other: &Accumulator) {
        if other.n == 0 {
            return;
        }
        if self.n == 0 {
            *self = *other;
            return;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        self.mean += delta * other.n as f64 / n as f64;
        self.m2 += other.m2 + delta * delta * (self.n as f64 * other.n as f64 / n as f64);
        self.n = n;
    }

    pub fn estimate(&self) -> McEstimate {
        let mean = if self.n == 0 { f64::NAN } else { self.mean };
        let stderr = if self.n < 2 {
            f64::INFINITY
        } else {
            (self.m2 / (self.n - 1) as f64 / self.n as f64).sqrt()
        };
        McEstimate {
            mean,
            stderr,
            n_samples: self.n,
        }
    }
}

const CHUNK: u64 = 2048;

/// Runs `work` over fixed chunks of `0..n` in parallel and returns the chunk
/// results in index order, so merged results do not depend on scheduling.
pub(crate) fn chunked<T, F>(n: u64, work: F) -> Vec<T>
where
    T: Send,
    F: Fn(std::ops::Range<u64>) -> T + Sync,
{
    let chunks = n.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| work(c * CHUNK..((c + 1) * CHUNK).min(n)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_two_pass_formulas() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 37) % 101) as f64 * 0.25 + 1e6).collect();
        let est = McEstimate::from_samples(&xs);
        let mean = xs.iter().sum::<f64>() / 1000.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 999.0;
        assert!((est.mean - mean).abs() < 1e-8);
        assert!((est.stderr - (var / 1000.0).sqrt()).abs() < 1e-10);
        assert_eq!(est.n_samples, 1000);
    }

    #[test]
    fn merge_equals_sequential() {
        let xs: Vec<f64> = (0..500).map(|i| (i as f64).sin()).collect();
        let mut a = Accumulator::default();
        let mut b = Accumulator::default();
        let mut all = Accumulator::default();
        for (i, &x) in xs.iter().enumerate() {
            if i < 123 { a.push(x) } else { b.push(x) }
            all.push(x);
        }
        a.merge(&b);
        assert!((a.mean - all.mean).abs() < 1e-15);
        assert!((a.m2 - all.m2).abs() < 1e-12);
    }

    #[test]
    fn pooling_equal_runs() {
        let a = McEstimate::from_samples(&[1.0, 2.0, 3.0, 4.0]);
        let b = McEstimate::from_samples(&[2.0, 3.0, 4.0, 5.0]);
        let p = McEstimate::pool(&[a, b]);
        assert_eq!(p.n_samples, 8);
        assert!((p.mean - 3.0).abs() < 1e-15);
        assert!((p.stderr - a.stderr / 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(McEstimate::pool(&[a]), a);
    }

    #[test]
    fn too_few_samples() {
        assert!(McEstimate::from_samples(&[1.0]).stderr.is_infinite());
        assert!(McEstimate::from_samples(&[]).mean.is_nan());
    }

    #[test]
    fn chunks_cover_range_in_order() {
        let parts = chunked(5000, |r| (r.start, r.end));
        assert_eq!(parts.first(), Some(&(0, 2048)));
        assert_eq!(parts.last(), Some(&(4096, 5000)));
    }
}
