use std::f64::consts::{LN_2, PI};

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::assoc::{associate_with, AssociationRule};
use super::fading::FadingModel;
use super::geometry::{far_field_mean, realization_at, sample_ppp_disc, Point2, Windows};
use super::rng::{stream, Domain};
use super::stats::{chunked, Accumulator, McEstimate};
use super::McOptions;
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, Scheme, Tier};
use crate::uplink::UplinkPowers;

/// Expected number of interfering users inside the interferer window.
pub const INTERFERER_EXPECTED_COUNT: f64 = 500.0;

/// Candidate users per expected scheduled user in [`InterfererMode::ExactPerCell`].
const CANDIDATE_OVERSAMPLING: f64 = 8.0;

/// How interfering uplink users are placed around the receiving station.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum InterfererMode {
    /// Independent Poisson processes of density `S λ_M` (macro users) and
    /// `λ_i` (tier-`i` users).
    #[default]
    PppDensity,
    /// Stations are drawn around the receiver and every cell schedules exactly
    /// `S` (macro) or one (small cell) user, picked among oversampled candidate
    /// users that associate with it. Cells left without candidates schedule
    /// fewer users.
    ExactPerCell,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UplinkMc {
    pub scheme: Scheme,
    pub mode: InterfererMode,
    /// Mean rate of users served by each tier, macro first, in bits/s/Hz.
    pub per_tier: Vec<McEstimate>,
    pub hetnet: McEstimate,
    pub interferer_radius: f64,
}

impl UplinkMc {
    pub fn tier(&self, tier: Tier) -> McEstimate {
        self.per_tier[slot(tier)]
    }
}

fn slot(tier: Tier) -> usize {
    match tier {
        Tier::Macro => 0,
        Tier::Small(k) => k + 1,
    }
}

/// Radius of the disc around the receiving station holding
/// [`INTERFERER_EXPECTED_COUNT`] interfering users on average.
pub fn interferer_radius(cfg: &NetworkConfig) -> f64 {
    let m = &cfg.macro_tier;
    let density = f64::from(m.users) * m.density + cfg.small_tiers.iter().map(|t| t.density).sum::<f64>();
    (INTERFERER_EXPECTED_COUNT / (PI * density)).sqrt().max(2.0 * cfg.system.reference_distance)
}

/// Uniform-grid nearest-neighbour index over a square.
struct Grid<'a> {
    points: &'a [Point2],
    half_width: f64,
    cell: f64,
    side: usize,
    buckets: Vec<Vec<u32>>,
}

impl<'a> Grid<'a> {
    fn new(points: &'a [Point2], half_width: f64, cell: f64) -> Self {
        let side = ((2.0 * half_width / cell).ceil() as usize).clamp(1, 4096);
        let cell = 2.0 * half_width / side as f64;
        let mut grid = Grid {
            points,
            half_width,
            cell,
            side,
            buckets: vec![Vec::new(); side * side],
        };
        for (i, p) in points.iter().enumerate() {
            let (cx, cy) = grid.cell_of(p);
            grid.buckets[cy * side + cx].push(i as u32);
        }
        grid
    }

    fn cell_of(&self, p: &Point2) -> (usize, usize) {
        let f = |v: f64| (((v + self.half_width) / self.cell).floor().max(0.0) as usize).min(self.side - 1);
        (f(p.x), f(p.y))
    }

    fn nearest(&self, p: &Point2) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let (cx, cy) = self.cell_of(p);
        let (cx, cy) = (cx as isize, cy as isize);
        let side = self.side as isize;
        let mut best: Option<(usize, f64)> = None;
        for ring in 0..=side {
            for dy in -ring..=ring {
                for dx in -ring..=ring {
                    if dx.abs() != ring && dy.abs() != ring {
                        continue;
                    }
                    let (x, y) = (cx + dx, cy + dy);
                    if x < 0 || y < 0 || x >= side || y >= side {
                        continue;
                    }
                    for &i in &self.buckets[(y * side + x) as usize] {
                        let d = self.points[i as usize].distance(p);
                        if best.is_none_or(|(_, b)| d < b) {
                            best = Some((i as usize, d));
                        }
                    }
                }
            }
            if let Some((_, b)) = best {
                if b <= ring as f64 * self.cell {
                    break;
                }
            }
        }
        best
    }
}

struct UplinkSim<'a> {
    cfg: &'a NetworkConfig,
    powers: &'a UplinkPowers,
    rule: AssociationRule,
    fading: FadingModel,
    mode: InterfererMode,
    n_fading: u32,
    radius: f64,
}

impl<'a> UplinkSim<'a> {
    fn new(cfg: &'a NetworkConfig, powers: &'a UplinkPowers, opts: &McOptions) -> Result<Self> {
        if powers.p_tier.len() != cfg.small_tiers.len() {
            return Err(Error::InvalidConfig("one uplink power per small tier is required".into()));
        }
        Ok(UplinkSim {
            cfg,
            powers,
            rule: AssociationRule::new(cfg, powers.scheme),
            fading: FadingModel::new(&cfg.macro_tier, opts.fading),
            mode: opts.interferer_mode,
            n_fading: opts.n_fading,
            radius: opts.window_radius.unwrap_or_else(|| interferer_radius(cfg)),
        })
    }

    /// `(density, power)` of each interfering user process, macro users first.
    fn processes(&self) -> Vec<(f64, f64)> {
        let m = &self.cfg.macro_tier;
        std::iter::once((f64::from(m.users) * m.density, self.powers.p_macro))
            .chain(self.cfg.small_tiers.iter().zip(&self.powers.p_tier).map(|(t, &p)| (t.density, p)))
            .collect()
    }

    /// Mean interference from users beyond the window at a `tier` station.
    fn far_field(&self, tier: Tier) -> f64 {
        let alpha = self.cfg.alpha(tier);
        self.processes()
            .iter()
            .map(|&(density, power)| far_field_mean(power, density, alpha, self.radius, self.cfg.system.beta))
            .sum()
    }

    /// Positions (relative to the receiving station) and powers of the
    /// interfering users inside the window.
    fn interferers<R: Rng>(&self, rng: &mut R, receiving: Tier) -> Vec<(Point2, f64)> {
        match self.mode {
            InterfererMode::PppDensity => self
                .processes()
                .into_iter()
                .flat_map(|(density, power)| {
                    sample_ppp_disc(rng, density, self.radius).into_iter().map(move |p| (p, power))
                })
                .collect(),
            InterfererMode::ExactPerCell => self.scheduled_users(rng, receiving),
        }
    }

    fn scheduled_users<R: Rng>(&self, rng: &mut R, receiving: Tier) -> Vec<(Point2, f64)> {
        let cfg = self.cfg;
        let min_density = cfg.tiers().map(|t| cfg.density(t)).fold(f64::INFINITY, f64::min);
        let outer = self.radius + 4.0 / (PI * min_density).sqrt();
        let mut stations: Vec<Vec<Point2>> = cfg.tiers().map(|t| sample_ppp_disc(rng, cfg.density(t), outer)).collect();
        let own = &mut stations[slot(receiving)];
        own.push(Point2::default());
        let receiver_index = own.len() - 1;
        let grids: Vec<Grid> = cfg
            .tiers()
            .zip(&stations)
            .map(|(t, pts)| Grid::new(pts, outer, 1.0 / cfg.density(t).sqrt()))
            .collect();
        let processes = self.processes();
        let user_density: f64 = processes.iter().map(|(d, _)| d).sum();
        let candidates = sample_ppp_disc(rng, CANDIDATE_OVERSAMPLING * user_density, outer);
        let mut scheduled: Vec<Vec<u32>> = stations.iter().map(|s| vec![0; s.len()]).collect();
        let mut users = Vec::new();
        for c in &candidates {
            let best = self.rule.choose(
                cfg.tiers()
                    .zip(&grids)
                    .filter_map(|(t, g)| g.nearest(c).map(|(i, d)| (t, i, d))),
            );
            let Some(serving) = best else { continue };
            if serving.tier == receiving && serving.index == receiver_index {
                continue;
            }
            let quota = match serving.tier {
                Tier::Macro => cfg.macro_tier.users,
                Tier::Small(_) => 1,
            };
            let count = &mut scheduled[slot(serving.tier)][serving.index];
            if *count < quota {
                *count += 1;
                if c.norm() <= self.radius {
                    users.push((*c, processes[slot(serving.tier)].1));
                }
            }
        }
        users
    }

    /// One SINR draw at a `tier` station serving a user at `distance`.
    fn sinr<R: Rng>(&self, rng: &mut R, tier: Tier, distance: f64, gains: &[f64], far: f64) -> f64 {
        let signal_gain = match tier {
            Tier::Macro => self.fading.uplink_serving(rng),
            Tier::Small(_) => self.fading.exponential(rng),
        };
        let signal = self.powers.get(tier) * signal_gain * self.cfg.path_loss(tier, distance);
        let interference: f64 = gains.iter().map(|g| g * self.fading.exponential(rng)).sum();
        signal / (interference + far + self.cfg.system.noise_power)
    }

    /// Mean-path-gain-weighted powers of the interferers at a `tier` station.
    fn interferer_gains(&self, tier: Tier, interferers: &[(Point2, f64)]) -> Vec<f64> {
        interferers.iter().map(|(p, power)| power * self.cfg.path_loss(tier, p.norm())).collect()
    }

    fn rate_factor(&self) -> f64 {
        (1.0 - self.cfg.system.tau) / LN_2
    }

    /// Rate averaged over the fading draws of one geometry draw.
    fn rate<R: Rng>(&self, geometry: &mut R, fading: &mut R, tier: Tier, distance: f64, far: f64) -> f64 {
        let interferers = self.interferers(geometry, tier);
        let gains = self.interferer_gains(tier, &interferers);
        let sum: f64 = (0..self.n_fading)
            .map(|_| self.sinr(fading, tier, distance, &gains, far).ln_1p())
            .sum();
        self.rate_factor() * sum / f64::from(self.n_fading)
    }
}

/// Empirical uplink rates at the given transmit powers, per serving tier and
/// over all users.
pub fn measure_uplink_rate(cfg: &NetworkConfig, powers: &UplinkPowers, opts: &McOptions) -> Result<UplinkMc> {
    cfg.validate()?;
    opts.validate()?;
    let sim = UplinkSim::new(cfg, powers, opts)?;
    // Geometry of the associating user always uses the association windows.
    let windows = Windows::auto(cfg);
    let far: Vec<f64> = cfg.tiers().map(|t| sim.far_field(t)).collect();
    let tiers = 1 + cfg.small_tiers.len();
    let parts = chunked(opts.n_geometry, |range| -> Result<(Vec<Accumulator>, Accumulator)> {
        let mut per_tier = vec![Accumulator::default(); tiers];
        let mut all = Accumulator::default();
        for i in range {
            let real = realization_at(cfg, &windows, opts.seed, i);
            let serving = associate_with(&sim.rule, &real)?;
            let mut geometry = stream(opts.seed, Domain::Interferers, i);
            let mut fading = stream(opts.seed, Domain::Fading, i);
            let r = sim.rate(&mut geometry, &mut fading, serving.tier, serving.distance, far[slot(serving.tier)]);
            per_tier[slot(serving.tier)].push(r);
            all.push(r);
        }
        Ok((per_tier, all))
    });
    let mut per_tier = vec![Accumulator::default(); tiers];
    let mut all = Accumulator::default();
    for part in parts {
        let (p, a) = part?;
        for (acc, other) in per_tier.iter_mut().zip(&p) {
            acc.merge(other);
        }
        all.merge(&a);
    }
    Ok(UplinkMc {
        scheme: powers.scheme,
        mode: opts.interferer_mode,
        per_tier: per_tier.iter().map(Accumulator::estimate).collect(),
        hetnet: all.estimate(),
        interferer_radius: sim.radius,
    })
}

/// Empirical rate of a user served by `tier` at `distance`.
pub fn measure_uplink_rate_conditional(
    cfg: &NetworkConfig,
    powers: &UplinkPowers,
    tier: Tier,
    distance: f64,
    opts: &McOptions,
) -> Result<McEstimate> {
    cfg.validate()?;
    opts.validate()?;
    let sim = UplinkSim::new(cfg, powers, opts)?;
    let far = sim.far_field(tier);
    let parts = chunked(opts.n_geometry, |range| {
        let mut acc = Accumulator::default();
        for i in range {
            let mut geometry = stream(opts.seed, Domain::Interferers, i);
            let mut fading = stream(opts.seed, Domain::Fading, i);
            acc.push(sim.rate(&mut geometry, &mut fading, tier, distance, far));
        }
        acc
    });
    let mut acc = Accumulator::default();
    for p in &parts {
        acc.merge(p);
    }
    Ok(acc.estimate())
}

/// SINR samples of a user served by `tier` at `distance`, `n_fading` per
/// geometry draw, in draw order.
pub fn sample_uplink_sinr(
    cfg: &NetworkConfig,
    powers: &UplinkPowers,
    tier: Tier,
    distance: f64,
    opts: &McOptions,
) -> Result<Vec<f64>> {
    cfg.validate()?;
    opts.validate()?;
    let sim = UplinkSim::new(cfg, powers, opts)?;
    let far = sim.far_field(tier);
    let parts = chunked(opts.n_geometry, |range| {
        let mut out = Vec::new();
        for i in range {
            let mut geometry = stream(opts.seed, Domain::Interferers, i);
            let mut fading = stream(opts.seed, Domain::Fading, i);
            let interferers = sim.interferers(&mut geometry, tier);
            let gains = sim.interferer_gains(tier, &interferers);
            out.extend((0..sim.n_fading).map(|_| sim.sinr(&mut fading, tier, distance, &gains, far)));
        }
        out
    });
    Ok(parts.concat())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::two_tier;
    use crate::specialfn::{integrate, QuadratureSpec};

    fn powers(cfg: &NetworkConfig) -> UplinkPowers {
        UplinkPowers {
            scheme: Scheme::Drsp,
            p_macro: 1e-3,
            p_tier: vec![1e-3; cfg.small_tiers.len()],
        }
    }

    #[test]
    fn grid_nearest_matches_brute_force() {
        let mut rng = stream(3, Domain::Geometry, 0);
        let pts = sample_ppp_disc(&mut rng, 0.01, 80.0);
        let grid = Grid::new(&pts, 80.0, 10.0);
        let probes = sample_ppp_disc(&mut rng, 0.01, 80.0);
        for q in &probes {
            let brute = pts
                .iter()
                .enumerate()
                .map(|(i, p)| (i, p.distance(q)))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert_eq!(grid.nearest(q).unwrap().0, brute.0);
        }
    }

    #[test]
    fn full_harvest_time_gives_zero_rate() {
        let mut cfg = two_tier(64, 4, 2.8, 2.5, 5.0, 30.0);
        cfg.system.tau = 1.0;
        let opts = McOptions {
            n_geometry: 20,
            n_fading: 2,
            ..McOptions::default()
        };
        let mc = measure_uplink_rate(&cfg, &powers(&cfg), &opts).unwrap();
        assert_eq!(mc.hetnet.mean, 0.0);
    }

    #[test]
    fn noise_limited_rate_matches_quadrature() {
        // Negligible interferers: rate = (1 − τ) E[log2(1 + P h L / δ²)], h ~ Exp(1).
        let mut cfg = two_tier(64, 4, 2.8, 3.0, 5.0, 30.0);
        cfg.small_tiers[0].density = 1e-9;
        cfg.system.noise_power = 1e-9;
        let p = UplinkPowers {
            scheme: Scheme::Drsp,
            p_macro: 1e-30,
            p_tier: vec![1e-3],
        };
        let y = 5.0;
        let snr = 1e-3 * cfg.path_loss(Tier::Small(0), y) / cfg.system.noise_power;
        let opts = McOptions {
            n_geometry: 20_000,
            n_fading: 1,
            ..McOptions::default()
        };
        let mc = measure_uplink_rate_conditional(&cfg, &p, Tier::Small(0), y, &opts).unwrap();
        let exact = (1.0 - cfg.system.tau)
            * integrate(|h: f64| (-h).exp() * (snr * h).ln_1p() / LN_2, 0.0, f64::INFINITY, &QuadratureSpec::default())
                .unwrap();
        assert!(mc.z_score(exact).abs() < 4.0, "{mc:?} vs {exact}");
    }

    #[test]
    fn exact_per_cell_runs() {
        let cfg = two_tier(64, 4, 2.8, 2.5, 5.0, 30.0);
        let opts = McOptions {
            n_geometry: 8,
            n_fading: 2,
            interferer_mode: InterfererMode::ExactPerCell,
            ..McOptions::default()
        };
        let mc = measure_uplink_rate(&cfg, &powers(&cfg), &opts).unwrap();
        assert!(mc.hetnet.mean > 0.0 && mc.hetnet.mean.is_finite());
    }
}
