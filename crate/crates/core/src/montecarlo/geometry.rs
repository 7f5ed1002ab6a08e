use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use super::rng::{stream, Domain};
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, Tier};

/// Expected number of stations of a tier inside its default window. The
/// nearest station then lies outside the window with probability e^(−40).
pub const WINDOW_EXPECTED_COUNT: f64 = 40.0;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Point2 { x, y }
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Simulation window radius of every tier, in meters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Windows {
    pub macro_radius: f64,
    pub small_radius: Vec<f64>,
}

impl Windows {
    /// Radii holding [`WINDOW_EXPECTED_COUNT`] stations on average, and at
    /// least twice the reference distance.
    pub fn auto(cfg: &NetworkConfig) -> Self {
        let floor = 2.0 * cfg.system.reference_distance;
        let radius = |density: f64| (WINDOW_EXPECTED_COUNT / (PI * density)).sqrt().max(floor);
        Windows {
            macro_radius: radius(cfg.macro_tier.density),
            small_radius: cfg.small_tiers.iter().map(|t| radius(t.density)).collect(),
        }
    }

    pub fn uniform(cfg: &NetworkConfig, radius: f64) -> Result<Self> {
        if !(radius > cfg.system.reference_distance && radius.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "window radius {radius} must be finite and exceed the reference distance"
            )));
        }
        Ok(Windows {
            macro_radius: radius,
            small_radius: vec![radius; cfg.small_tiers.len()],
        })
    }

    pub fn resolve(cfg: &NetworkConfig, radius: Option<f64>) -> Result<Self> {
        match radius {
            Some(r) => Self::uniform(cfg, r),
            None => Ok(Self::auto(cfg)),
        }
    }

    pub fn radius(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.macro_radius,
            Tier::Small(k) => self.small_radius[k],
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Windows {
            macro_radius: self.macro_radius * factor,
            small_radius: self.small_radius.iter().map(|r| r * factor).collect(),
        }
    }
}

/// One draw of every tier's stations around the typical user at the origin.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkRealization {
    pub macro_points: Vec<Point2>,
    pub small_points: Vec<Vec<Point2>>,
    pub windows: Windows,
    pub seed: u64,
}

impl NetworkRealization {
    pub fn points(&self, tier: Tier) -> &[Point2] {
        match tier {
            Tier::Macro => &self.macro_points,
            Tier::Small(k) => &self.small_points[k],
        }
    }

    pub fn station_count(&self) -> usize {
        self.macro_points.len() + self.small_points.iter().map(Vec::len).sum::<usize>()
    }
}

/// Homogeneous Poisson process of the given density restricted to the disc of
/// radius `radius` centred at the origin.
pub fn sample_ppp_disc<R: Rng + ?Sized>(rng: &mut R, density: f64, radius: f64) -> Vec<Point2> {
    sample_ppp_annulus(rng, density, 0.0, radius)
}

/// Same on the annulus `inner ≤ r ≤ outer`.
pub fn sample_ppp_annulus<R: Rng + ?Sized>(rng: &mut R, density: f64, inner: f64, outer: f64) -> Vec<Point2> {
    let area = PI * (outer * outer - inner * inner);
    let mean = density * area;
    if !(mean > 0.0) {
        return Vec::new();
    }
    let count = Poisson::new(mean).expect("positive finite mean").sample(rng) as usize;
    let inner2 = inner * inner;
    let span = outer * outer - inner2;
    (0..count)
        .map(|_| {
            let r = (inner2 + span * rng.random::<f64>()).sqrt();
            let theta = 2.0 * PI * rng.random::<f64>();
            Point2::new(r * theta.cos(), r * theta.sin())
        })
        .collect()
}

pub(crate) fn sample_tiers<R: Rng + ?Sized>(
    rng: &mut R,
    cfg: &NetworkConfig,
    windows: &Windows,
) -> (Vec<Point2>, Vec<Vec<Point2>>) {
    let macro_points = sample_ppp_disc(rng, cfg.macro_tier.density, windows.macro_radius);
    let small_points = cfg
        .small_tiers
        .iter()
        .zip(&windows.small_radius)
        .map(|(t, &r)| sample_ppp_disc(rng, t.density, r))
        .collect();
    (macro_points, small_points)
}

/// The `index`-th realization of the geometry stream of `seed`.
pub(crate) fn realization_at(cfg: &NetworkConfig, windows: &Windows, seed: u64, index: u64) -> NetworkRealization {
    let mut rng = stream(seed, Domain::Geometry, index);
    let (macro_points, small_points) = sample_tiers(&mut rng, cfg, windows);
    NetworkRealization {
        macro_points,
        small_points,
        windows: windows.clone(),
        seed,
    }
}

pub fn sample_realization(cfg: &NetworkConfig, windows: &Windows, seed: u64) -> NetworkRealization {
    realization_at(cfg, windows, seed, 0)
}

/// Mean of `P β Σ max{r, d}^(−α)` over stations beyond `radius ≥ d`.
pub fn far_field_mean(power: f64, density: f64, alpha: f64, radius: f64, beta: f64) -> f64 {
    power * beta * 2.0 * PI * density * radius.powf(2.0 - alpha) / (alpha - 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::two_tier;

    #[test]
    fn points_stay_in_window() {
        let cfg = two_tier(64, 4, 3.0, 3.5, 5.0, 30.0);
        let w = Windows::auto(&cfg);
        let r = sample_realization(&cfg, &w, 11);
        assert!(r.macro_points.iter().all(|p| p.norm() <= w.macro_radius));
        assert!(r.small_points[0].iter().all(|p| p.norm() <= w.small_radius[0]));
    }

    #[test]
    fn annulus_respects_bounds() {
        let mut rng = stream(1, Domain::Geometry, 0);
        let pts = sample_ppp_annulus(&mut rng, 0.05, 10.0, 20.0);
        assert!(!pts.is_empty());
        assert!(pts.iter().all(|p| (10.0..=20.0).contains(&p.norm())));
    }

    #[test]
    fn empty_tier() {
        let mut rng = stream(1, Domain::Geometry, 0);
        assert!(sample_ppp_disc(&mut rng, 0.0, 100.0).is_empty());
    }

    #[test]
    fn same_seed_same_realization() {
        let cfg = two_tier(64, 4, 3.0, 3.5, 5.0, 30.0);
        let w = Windows::auto(&cfg);
        assert_eq!(sample_realization(&cfg, &w, 5), sample_realization(&cfg, &w, 5));
        assert_ne!(sample_realization(&cfg, &w, 5), sample_realization(&cfg, &w, 6));
    }

    #[test]
    fn window_validation() {
        let cfg = two_tier(64, 4, 3.0, 3.5, 5.0, 30.0);
        assert!(Windows::uniform(&cfg, 0.5).is_err());
        assert_eq!(Windows::uniform(&cfg, 300.0).unwrap().radius(Tier::Small(0)), 300.0);
        let auto = Windows::auto(&cfg);
        assert!((PI * 1e-3 * auto.macro_radius.powi(2) - WINDOW_EXPECTED_COUNT).abs() < 1e-9);
    }
}
