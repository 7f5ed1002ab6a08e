use serde::{Deserialize, Serialize};

use super::assoc::{associate_with, AssociationRule, Serving};
use super::fading::FadingModel;
use super::geometry::{far_field_mean, realization_at, sample_ppp_annulus, Point2, Windows};
use super::rng::{stream, Domain};
use super::stats::{chunked, Accumulator, McEstimate};
use super::McOptions;
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, Scheme, Tier};

/// Empirical harvested energy of users served by one tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TierEnergyMc {
    pub tier: Tier,
    /// directed, isotropic, ambient macro, ambient small.
    pub components: [McEstimate; 4],
    pub total: McEstimate,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyMc {
    pub scheme: Scheme,
    pub windows: Windows,
    /// Macro first.
    pub per_tier: Vec<TierEnergyMc>,
    /// Over all users regardless of tier.
    pub hetnet: McEstimate,
}

impl EnergyMc {
    pub fn tier(&self, tier: Tier) -> &TierEnergyMc {
        &self.per_tier[slot(tier)]
    }
}

fn slot(tier: Tier) -> usize {
    match tier {
        Tier::Macro => 0,
        Tier::Small(k) => k + 1,
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct TierAcc {
    parts: [Accumulator; 5],
}

impl TierAcc {
    fn push(&mut self, c: [f64; 4]) {
        for (acc, v) in self.parts.iter_mut().zip(c) {
            acc.push(v);
        }
        self.parts[4].push(c[0] + c[1] + c[2] + c[3]);
    }

    fn merge(&mut self, other: &TierAcc) {
        for (a, b) in self.parts.iter_mut().zip(&other.parts) {
            a.merge(b);
        }
    }

    fn finish(&self, tier: Tier) -> TierEnergyMc {
        TierEnergyMc {
            tier,
            components: std::array::from_fn(|j| self.parts[j].estimate()),
            total: self.parts[4].estimate(),
        }
    }
}

/// Energy harvested in one geometry draw, averaged over `n_fading` fading
/// draws. Stations are listed per tier, macro first; `serving` indexes into
/// them. `far` is the mean ambient power from beyond each tier's window.
struct Harvest<'a> {
    cfg: &'a NetworkConfig,
    fading: &'a FadingModel,
    n_fading: u32,
}

impl Harvest<'_> {
    fn energy<R: rand::Rng>(&self, rng: &mut R, stations: &[&[Point2]], serving: Serving, far: &[f64]) -> [f64; 4] {
        let cfg = self.cfg;
        let sys = &cfg.system;
        let scale = sys.eta * sys.harvest_time();
        let (directed, isotropic) = match serving.tier {
            Tier::Macro => {
                let m = &cfg.macro_tier;
                let per_user = m.power / f64::from(m.users) * cfg.path_loss(Tier::Macro, serving.distance);
                (
                    per_user * self.fading.directed(rng, self.n_fading),
                    per_user * self.fading.isotropic_sum(rng, m.users - 1, self.n_fading),
                )
            }
            Tier::Small(k) => {
                let power = cfg.small_tiers[k].power;
                let l = cfg.path_loss(serving.tier, serving.distance);
                (0.0, power * l * self.fading.unit(rng, self.n_fading))
            }
        };
        let mut ambient = [0.0; 2];
        for (tier, (points, far)) in cfg.tiers().zip(stations.iter().zip(far)) {
            let alpha = cfg.alpha(tier);
            let d = sys.reference_distance;
            let mut sum = 0.0;
            for (i, p) in points.iter().enumerate() {
                if tier == serving.tier && i == serving.index {
                    continue;
                }
                sum += self.fading.unit(rng, self.n_fading) * p.norm().max(d).powf(-alpha);
            }
            let received = cfg.power(tier) * sys.beta * sum + far;
            ambient[usize::from(tier != Tier::Macro)] += received;
        }
        [directed * scale, isotropic * scale, ambient[0] * scale, ambient[1] * scale]
    }
}

fn far_field(cfg: &NetworkConfig, radii: impl Iterator<Item = f64>) -> Vec<f64> {
    cfg.tiers()
        .zip(radii)
        .map(|(t, r)| far_field_mean(cfg.power(t), cfg.density(t), cfg.alpha(t), r, cfg.system.beta))
        .collect()
}

/// Empirical mean harvested energy per serving tier and over all users.
///
/// Each geometry draw contributes one sample: its energy averaged over
/// `n_fading` fading draws. Ambient power from beyond each tier's window is
/// added as its exact mean.
pub fn measure_energy(scheme: Scheme, cfg: &NetworkConfig, opts: &McOptions) -> Result<EnergyMc> {
    cfg.validate()?;
    opts.validate()?;
    let windows = Windows::resolve(cfg, opts.window_radius)?;
    let rule = AssociationRule::new(cfg, scheme);
    let fading = FadingModel::new(&cfg.macro_tier, opts.fading);
    let harvest = Harvest {
        cfg,
        fading: &fading,
        n_fading: opts.n_fading,
    };
    let far = far_field(cfg, cfg.tiers().map(|t| windows.radius(t)));
    let tiers = 1 + cfg.small_tiers.len();

    let parts = chunked(opts.n_geometry, |range| -> Result<(Vec<TierAcc>, Accumulator)> {
        let mut per_tier = vec![TierAcc::default(); tiers];
        let mut all = Accumulator::default();
        for i in range {
            let real = realization_at(cfg, &windows, opts.seed, i);
            let serving = associate_with(&rule, &real)?;
            let stations: Vec<&[Point2]> = cfg.tiers().map(|t| real.points(t)).collect();
            let mut rng = stream(opts.seed, Domain::Fading, i);
            let c = harvest.energy(&mut rng, &stations, serving, &far);
            per_tier[slot(serving.tier)].push(c);
            all.push(c.iter().sum());
        }
        Ok((per_tier, all))
    });

    let mut per_tier = vec![TierAcc::default(); tiers];
    let mut all = Accumulator::default();
    for part in parts {
        let (p, a) = part?;
        for (acc, other) in per_tier.iter_mut().zip(&p) {
            acc.merge(other);
        }
        all.merge(&a);
    }
    Ok(EnergyMc {
        scheme,
        windows,
        per_tier: cfg.tiers().zip(&per_tier).map(|(t, acc)| acc.finish(t)).collect(),
        hetnet: all.estimate(),
    })
}

/// Empirical energy of a user served by `tier` at distance `distance`.
///
/// The serving station is placed at that distance and every tier's other
/// stations are drawn from the region the association rule leaves free:
/// beyond the distance at which they would outscore the serving station.
pub fn measure_energy_conditional(
    scheme: Scheme,
    cfg: &NetworkConfig,
    tier: Tier,
    distance: f64,
    opts: &McOptions,
) -> Result<TierEnergyMc> {
    cfg.validate()?;
    opts.validate()?;
    if !(distance > 0.0 && distance.is_finite()) {
        return Err(Error::domain("measure_energy_conditional", "serving distance must be positive"));
    }
    if let Tier::Small(k) = tier {
        if k >= cfg.small_tiers.len() {
            return Err(Error::InvalidConfig(format!("{tier} does not exist")));
        }
    }
    let windows = Windows::resolve(cfg, opts.window_radius)?;
    let rule = AssociationRule::new(cfg, scheme);
    let score = rule.score(tier, distance);
    let exclusion: Vec<f64> = cfg
        .tiers()
        .map(|t| if t == tier { distance } else { rule.distance_at(t, score) })
        .collect();
    let outer: Vec<f64> = cfg.tiers().zip(&exclusion).map(|(t, lo)| lo + windows.radius(t)).collect();
    let far = far_field(cfg, outer.iter().copied());
    let fading = FadingModel::new(&cfg.macro_tier, opts.fading);
    let harvest = Harvest {
        cfg,
        fading: &fading,
        n_fading: opts.n_fading,
    };

    let parts = chunked(opts.n_geometry, |range| {
        let mut acc = TierAcc::default();
        for i in range {
            let mut rng = stream(opts.seed, Domain::Conditional, i);
            let mut points: Vec<Vec<Point2>> = cfg
                .tiers()
                .enumerate()
                .map(|(j, t)| sample_ppp_annulus(&mut rng, cfg.density(t), exclusion[j], outer[j]))
                .collect();
            let own = &mut points[slot(tier)];
            own.push(Point2::new(distance, 0.0));
            let serving = Serving {
                tier,
                index: own.len() - 1,
                distance,
            };
            let stations: Vec<&[Point2]> = points.iter().map(Vec::as_slice).collect();
            acc.push(harvest.energy(&mut rng, &stations, serving, &far));
        }
        acc
    });
    let mut acc = TierAcc::default();
    for p in &parts {
        acc.merge(p);
    }
    Ok(acc.finish(tier))
}
