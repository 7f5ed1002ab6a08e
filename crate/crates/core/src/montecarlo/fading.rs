use rand::Rng;
use rand_distr::{Distribution, Gamma};
use serde::{Deserialize, Serialize};

use crate::model::MacroTier;

/// Random fading, or every gain pinned at its mean.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum FadingMode {
    #[default]
    Random,
    Mean,
}

/// Small-scale fading power gains.
///
/// * directed (MRT to the user): Gamma(N, 1)
/// * isotropic, ambient and uplink interferer links: Exp(1)
/// * uplink serving link after zero forcing: Gamma(N − S + 1, 1)
#[derive(Debug, Clone)]
pub struct FadingModel {
    mode: FadingMode,
    directed_shape: f64,
    uplink_shape: f64,
}

impl FadingModel {
    pub fn new(macro_tier: &MacroTier, mode: FadingMode) -> Self {
        FadingModel {
            mode,
            directed_shape: f64::from(macro_tier.antennas),
            uplink_shape: macro_tier.gain_ul(),
        }
    }

    pub fn mode(&self) -> FadingMode {
        self.mode
    }

    /// Mean of `count` independent Gamma(shape, 1) draws, sampled in one go as
    /// Gamma(count·shape, 1)/count.
    fn averaged<R: Rng + ?Sized>(&self, rng: &mut R, shape: f64, count: u32) -> f64 {
        if shape == 0.0 {
            return 0.0;
        }
        match self.mode {
            FadingMode::Mean => shape,
            FadingMode::Random => {
                let n = f64::from(count);
                Gamma::new(n * shape, 1.0).expect("positive shape").sample(rng) / n
            }
        }
    }

    /// Directed gain averaged over `count` fading draws.
    pub fn directed<R: Rng + ?Sized>(&self, rng: &mut R, count: u32) -> f64 {
        self.averaged(rng, self.directed_shape, count)
    }

    /// Sum of `links` unit-mean exponential gains averaged over `count` draws.
    pub fn isotropic_sum<R: Rng + ?Sized>(&self, rng: &mut R, links: u32, count: u32) -> f64 {
        self.averaged(rng, f64::from(links), count)
    }

    pub fn unit<R: Rng + ?Sized>(&self, rng: &mut R, count: u32) -> f64 {
        self.averaged(rng, 1.0, count)
    }

    pub fn uplink_serving<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.averaged(rng, self.uplink_shape, 1)
    }

    pub fn exponential<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.mode {
            FadingMode::Mean => 1.0,
            FadingMode::Random => rand_distr::Exp1.sample(rng),
        }
    }
}
