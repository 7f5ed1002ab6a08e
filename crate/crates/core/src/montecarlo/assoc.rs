use serde::{Deserialize, Serialize};

use super::geometry::{realization_at, NetworkRealization, Point2, Windows};
use super::stats::{chunked, McEstimate};
use super::McOptions;
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, Scheme, Tier};

/// The station a user associates with.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Serving {
    pub tier: Tier,
    /// Index into the tier's point list.
    pub index: usize,
    pub distance: f64,
}

/// Association rule as `ln w_t − α_t ln r`: the user picks the largest score.
/// Path loss is not clamped here, matching the analytic association law.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct AssociationRule {
    log_weight: Vec<f64>,
    alpha: Vec<f64>,
}

impl AssociationRule {
    pub fn new(cfg: &NetworkConfig, scheme: Scheme) -> Self {
        let m = &cfg.macro_tier;
        let mut log_weight = vec![match scheme {
            Scheme::Drsp => (m.gain_dl() * m.power / f64::from(m.users)).ln(),
            Scheme::Ursp => m.gain_ul().ln(),
        }];
        log_weight.extend(cfg.small_tiers.iter().map(|t| match scheme {
            Scheme::Drsp => t.power.ln(),
            Scheme::Ursp => 0.0,
        }));
        AssociationRule {
            log_weight,
            alpha: cfg.tiers().map(|t| cfg.alpha(t)).collect(),
        }
    }

    fn slot(tier: Tier) -> usize {
        match tier {
            Tier::Macro => 0,
            Tier::Small(k) => k + 1,
        }
    }

    pub fn score(&self, tier: Tier, distance: f64) -> f64 {
        let i = Self::slot(tier);
        self.log_weight[i] - self.alpha[i] * distance.ln()
    }

    /// Distance at which a `tier` station scores exactly `score`.
    pub fn distance_at(&self, tier: Tier, score: f64) -> f64 {
        let i = Self::slot(tier);
        ((self.log_weight[i] - score) / self.alpha[i]).exp()
    }

    /// Best station given each tier's nearest one. Ties go to the lower tier.
    pub fn choose(&self, nearest: impl Iterator<Item = (Tier, usize, f64)>) -> Option<Serving> {
        let mut best: Option<(f64, Serving)> = None;
        for (tier, index, distance) in nearest {
            let s = self.score(tier, distance);
            if best.as_ref().is_none_or(|(b, _)| s > *b) {
                best = Some((s, Serving { tier, index, distance }));
            }
        }
        best.map(|(_, s)| s)
    }
}

/// Index and distance of the point nearest the origin; ties keep the first.
pub(crate) fn nearest(points: &[Point2]) -> Option<(usize, f64)> {
    points
        .iter()
        .map(Point2::norm)
        .enumerate()
        .fold(None, |best, (i, r)| match best {
            Some((_, b)) if b <= r => best,
            _ => Some((i, r)),
        })
}

pub(crate) fn associate_with(rule: &AssociationRule, realization: &NetworkRealization) -> Result<Serving> {
    let macro_best = nearest(&realization.macro_points).map(|(i, r)| (Tier::Macro, i, r));
    let small_best = realization
        .small_points
        .iter()
        .enumerate()
        .filter_map(|(k, pts)| nearest(pts).map(|(i, r)| (Tier::Small(k), i, r)));
    rule.choose(macro_best.into_iter().chain(small_best))
        .ok_or(Error::EmptyRealization)
}

/// Applies the scheme's association rule to a realization.
pub fn associate(realization: &NetworkRealization, scheme: Scheme, cfg: &NetworkConfig) -> Result<Serving> {
    associate_with(&AssociationRule::new(cfg, scheme), realization)
}

/// Empirical association frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationMc {
    pub scheme: Scheme,
    pub n_drops: u64,
    /// Drops served by each tier, macro first.
    pub counts: Vec<u64>,
    pub frequency: Vec<McEstimate>,
    pub windows: Windows,
}

impl AssociationMc {
    pub fn frequency(&self, tier: Tier) -> McEstimate {
        self.frequency[AssociationRule::slot(tier)]
    }
}

pub fn measure_association(scheme: Scheme, cfg: &NetworkConfig, opts: &McOptions) -> Result<AssociationMc> {
    let samples = sample_serving(scheme, cfg, opts)?;
    let tiers = 1 + cfg.small_tiers.len();
    let mut counts = vec![0u64; tiers];
    for s in &samples {
        counts[AssociationRule::slot(s.tier)] += 1;
    }
    let n = samples.len() as u64;
    let frequency = counts
        .iter()
        .map(|&c| {
            let p = c as f64 / n as f64;
            let stderr = if n > 1 { (p * (1.0 - p) / (n - 1) as f64).sqrt() } else { f64::INFINITY };
            McEstimate {
                mean: p,
                stderr,
                n_samples: n,
            }
        })
        .collect();
    Ok(AssociationMc {
        scheme,
        n_drops: n,
        counts,
        frequency,
        windows: Windows::resolve(cfg, opts.window_radius)?,
    })
}

/// Serving station of each geometry draw, in draw order.
pub fn sample_serving(scheme: Scheme, cfg: &NetworkConfig, opts: &McOptions) -> Result<Vec<Serving>> {
    cfg.validate()?;
    opts.validate()?;
    let windows = Windows::resolve(cfg, opts.window_radius)?;
    let rule = AssociationRule::new(cfg, scheme);
    let parts = chunked(opts.n_geometry, |range| {
        range
            .map(|i| associate_with(&rule, &realization_at(cfg, &windows, opts.seed, i)))
            .collect::<Result<Vec<_>>>()
    });
    let mut out = Vec::with_capacity(opts.n_geometry as usize);
    for part in parts {
        out.extend(part?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::two_tier;

    fn realization(macro_points: Vec<Point2>, small: Vec<Point2>, cfg: &NetworkConfig) -> NetworkRealization {
        NetworkRealization {
            macro_points,
            small_points: vec![small],
            windows: Windows::auto(cfg),
            seed: 0,
        }
    }

    #[test]
    fn lone_macro_station() {
        let cfg = two_tier(64, 4, 3.0, 3.5, 5.0, 30.0);
        let r = realization(vec![Point2::new(30.0, 40.0)], vec![], &cfg);
        let s = associate(&r, Scheme::Drsp, &cfg).unwrap();
        assert_eq!(s.tier, Tier::Macro);
        assert!((s.distance - 50.0).abs() < 1e-12);
    }

    #[test]
    fn equal_distance_prefers_stronger_macro() {
        let cfg = two_tier(64, 4, 3.0, 3.0, 5.0, 30.0);
        let r = realization(vec![Point2::new(10.0, 0.0)], vec![Point2::new(0.0, 10.0)], &cfg);
        assert_eq!(associate(&r, Scheme::Drsp, &cfg).unwrap().tier, Tier::Macro);
        assert_eq!(associate(&r, Scheme::Ursp, &cfg).unwrap().tier, Tier::Macro);
    }

    #[test]
    fn exact_tie_goes_to_lower_tier() {
        let cfg = two_tier(64, 4, 3.0, 3.0, 5.0, 30.0);
        let rule = AssociationRule::new(&cfg, Scheme::Ursp);
        let score = rule.score(Tier::Small(0), 10.0);
        let d_macro = rule.distance_at(Tier::Macro, score);
        assert!((rule.score(Tier::Macro, d_macro) - score).abs() < 1e-12);
        let tie = rule
            .choose([(Tier::Small(0), 0, 10.0), (Tier::Small(0), 1, 10.0)].into_iter())
            .unwrap();
        assert_eq!(tie.index, 0);
        let cross = rule.choose([(Tier::Macro, 0, 10.0), (Tier::Small(0), 0, 10.0)].into_iter());
        assert_eq!(cross.unwrap().tier, Tier::Macro);
    }

    #[test]
    fn nearer_small_cell_wins() {
        let cfg = two_tier(64, 4, 3.0, 3.5, 5.0, 30.0);
        let r = realization(vec![Point2::new(100.0, 0.0)], vec![Point2::new(3.0, 0.0)], &cfg);
        let s = associate(&r, Scheme::Ursp, &cfg).unwrap();
        assert_eq!(s.tier, Tier::Small(0));
    }

    #[test]
    fn empty_realization_is_an_error() {
        let cfg = two_tier(64, 4, 3.0, 3.5, 5.0, 30.0);
        let r = realization(vec![], vec![], &cfg);
        assert_eq!(associate(&r, Scheme::Drsp, &cfg), Err(Error::EmptyRealization));
    }

    #[test]
    fn frequencies_sum_to_one() {
        let cfg = two_tier(100, 5, 3.5, 4.0, 5.0, 30.0);
        let opts = McOptions {
            n_geometry: 3000,
            ..McOptions::default()
        };
        let mc = measure_association(Scheme::Drsp, &cfg, &opts).unwrap();
        assert_eq!(mc.counts.iter().sum::<u64>(), 3000);
        let total: f64 = mc.frequency.iter().map(|f| f.mean).sum();
        assert!((total - 1.0).abs() <= 4.0 * f64::EPSILON);
    }
}
