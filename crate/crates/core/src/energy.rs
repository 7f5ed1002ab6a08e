//! Downlink harvested energy: conditional means given the serving distance,
//! exact averages over the serving-distance law, large-N closed forms for the
//! macro tier, and network-wide averages.
//!
//! Ambient terms are interference means `P β 2πλ ∫_lo^∞ max{r, d}^(−α) r dr`
//! over the stations of a tier lying beyond the exclusion radius `lo` that the
//! association rule imposes.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::association::{assoc_prob_macro_asymptotic, AssociationResult, AsymptoticProb, ServingDistance};
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, Scheme, SystemParams, Tier};
use crate::specialfn::{
    integrate_piecewise, lower_incomplete_gamma, upper_incomplete_gamma_ext, QuadratureSpec,
};

/// Harvested energy per block split by source, in joules.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub directed: f64,
    pub isotropic: f64,
    pub ambient_macro: f64,
    pub ambient_small: f64,
    pub total: f64,
}

impl EnergyBreakdown {
    pub const COMPONENTS: [&'static str; 4] = ["directed", "isotropic", "ambient_macro", "ambient_small"];

    pub fn new(directed: f64, isotropic: f64, ambient_macro: f64, ambient_small: f64) -> Self {
        EnergyBreakdown {
            directed,
            isotropic,
            ambient_macro,
            ambient_small,
            total: directed + isotropic + ambient_macro + ambient_small,
        }
    }

    pub fn from_components(c: [f64; 4]) -> Self {
        Self::new(c[0], c[1], c[2], c[3])
    }

    pub fn components(&self) -> [f64; 4] {
        [self.directed, self.isotropic, self.ambient_macro, self.ambient_small]
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_components(self.components().map(|c| c * factor))
    }
}

/// Network-wide average energy and the per-tier terms it mixes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HetNetEnergy {
    pub scheme: Scheme,
    pub association: AssociationResult,
    pub macro_energy: EnergyBreakdown,
    pub tier_energy: Vec<EnergyBreakdown>,
    pub total: f64,
}

impl HetNetEnergy {
    pub fn tier(&self, tier: Tier) -> &EnergyBreakdown {
        match tier {
            Tier::Macro => &self.macro_energy,
            Tier::Small(k) => &self.tier_energy[k],
        }
    }
}

/// Large-N macro energy together with the association approximation it uses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticEnergy {
    pub energy: EnergyBreakdown,
    pub prob: AsymptoticProb,
}

/// `P β 2πλ ∫_lo^∞ max{r, d}^(−α) r dr`, the mean power received from a tier
/// whose stations all lie beyond `lo`.
pub fn ambient_mean(power: f64, density: f64, alpha: f64, lo: f64, sys: &SystemParams) -> f64 {
    let d = sys.reference_distance;
    let lo = lo.max(0.0);
    let integral = if lo <= d {
        d.powf(-alpha) * (d * d - lo * lo) / 2.0 + d.powf(2.0 - alpha) / (alpha - 2.0)
    } else {
        lo.powf(2.0 - alpha) / (alpha - 2.0)
    };
    power * sys.beta * 2.0 * PI * density * integral
}

/// Conditional and averaged energies of one scheme.
#[derive(Debug, Clone)]
pub struct EnergyModel<'a> {
    cfg: &'a NetworkConfig,
    serving: ServingDistance<'a>,
}

impl<'a> EnergyModel<'a> {
    pub fn new(cfg: &'a NetworkConfig, scheme: Scheme) -> Self {
        EnergyModel {
            cfg,
            serving: ServingDistance::new(cfg, scheme),
        }
    }

    pub fn serving(&self) -> &ServingDistance<'a> {
        &self.serving
    }

    fn ambient(&self, serving: Tier, x: f64) -> (f64, f64) {
        let sys = &self.cfg.system;
        let m = &self.cfg.macro_tier;
        let macro_lo = self.serving.exclusion_radius(serving, Tier::Macro, x);
        let ambient_macro = ambient_mean(m.power, m.density, m.alpha, macro_lo, sys);
        let ambient_small = self
            .cfg
            .small_tiers
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let lo = self.serving.exclusion_radius(serving, Tier::Small(i), x);
                ambient_mean(t.power, t.density, t.alpha, lo, sys)
            })
            .sum();
        (ambient_macro, ambient_small)
    }

    pub fn conditional(&self, tier: Tier, x: f64) -> EnergyBreakdown {
        let sys = &self.cfg.system;
        let scale = sys.eta * sys.harvest_time();
        let (am, asm) = self.ambient(tier, x);
        let gain = self.cfg.path_loss(tier, x);
        let (directed, isotropic) = match tier {
            Tier::Macro => {
                let m = &self.cfg.macro_tier;
                let per_user = m.power / f64::from(m.users) * gain;
                (f64::from(m.antennas) * per_user, f64::from(m.users - 1) * per_user)
            }
            Tier::Small(k) => (0.0, self.cfg.small_tiers[k].power * gain),
        };
        EnergyBreakdown::new(directed * scale, isotropic * scale, am * scale, asm * scale)
    }

    /// Distances at which some clamp or exclusion radius crosses `d`.
    fn breakpoints(&self, tier: Tier) -> Vec<f64> {
        let d = self.cfg.system.reference_distance;
        let mut points = vec![0.0, d];
        for other in self.cfg.tiers() {
            let at_one = self.serving.exclusion_radius(tier, other, 1.0);
            let ratio = self.cfg.alpha(other) / self.cfg.alpha(tier);
            points.push((d / at_one).powf(ratio));
        }
        points
    }

    /// Average over the serving-distance law given the tier's association
    /// probability.
    pub fn average(&self, tier: Tier, prob: f64, spec: &QuadratureSpec) -> Result<EnergyBreakdown> {
        if !(prob > 0.0) {
            return Err(Error::domain("average energy", format!("{tier} is never selected")));
        }
        let points = self.breakpoints(tier);
        let scale = self.cfg.length_scale();
        let mut out = [0.0; 4];
        for (j, slot) in out.iter_mut().enumerate() {
            let f = |x: f64| self.conditional(tier, x).components()[j] * self.serving.joint_density(tier, x);
            *slot = integrate_piecewise(f, &points, f64::INFINITY, scale, spec)? / prob;
        }
        Ok(EnergyBreakdown::from_components(out))
    }
}

pub fn cond_energy_macro(scheme: Scheme, x: f64, cfg: &NetworkConfig) -> EnergyBreakdown {
    EnergyModel::new(cfg, scheme).conditional(Tier::Macro, x)
}

pub fn cond_energy_tier_k(scheme: Scheme, k: usize, y: f64, cfg: &NetworkConfig) -> EnergyBreakdown {
    EnergyModel::new(cfg, scheme).conditional(Tier::Small(k), y)
}

pub fn avg_energy(scheme: Scheme, tier: Tier, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<EnergyBreakdown> {
    cfg.validate()?;
    let model = EnergyModel::new(cfg, scheme);
    let prob = model.serving().probability(tier, spec)?;
    model.average(tier, prob, spec)
}

pub fn avg_energy_macro(scheme: Scheme, cfg: &NetworkConfig) -> Result<EnergyBreakdown> {
    avg_energy(scheme, Tier::Macro, cfg, &QuadratureSpec::default())
}

pub fn avg_energy_tier_k(scheme: Scheme, k: usize, cfg: &NetworkConfig) -> Result<EnergyBreakdown> {
    avg_energy(scheme, Tier::Small(k), cfg, &QuadratureSpec::default())
}

pub fn hetnet_avg_energy(scheme: Scheme, cfg: &NetworkConfig) -> Result<HetNetEnergy> {
    hetnet_avg_energy_with(scheme, cfg, &QuadratureSpec::default())
}

pub fn hetnet_avg_energy_with(scheme: Scheme, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<HetNetEnergy> {
    cfg.validate()?;
    let model = EnergyModel::new(cfg, scheme);
    let association = model.serving().association(spec)?;
    let macro_energy = model.average(Tier::Macro, association.prob_macro, spec)?;
    let tier_energy = association
        .prob_tier
        .iter()
        .enumerate()
        .map(|(k, &p)| model.average(Tier::Small(k), p, spec))
        .collect::<Result<Vec<_>>>()?;
    let total = association.prob_macro * macro_energy.total
        + association.prob_tier.iter().zip(&tier_energy).map(|(p, e)| p * e.total).sum::<f64>();
    Ok(HetNetEnergy {
        scheme,
        association,
        macro_energy,
        tier_energy,
        total,
    })
}

/// Integrals of the first-order large-N macro serving-distance density
/// `f(x) = 2πλ_M x e^(−πλ_M x²) (1 − Σ πλ_i r_i² x^(2 p_i)) / Ψ∞`,
/// `p_i = α_M / α_i`.
#[derive(Debug, Clone, PartialEq)]
pub struct XiFunctions {
    macro_density: f64,
    psi_inf: f64,
    /// `(π λ_i r_i², p_i)` per small tier.
    terms: Vec<(f64, f64)>,
}

impl XiFunctions {
    pub fn new(cfg: &NetworkConfig, scheme: Scheme) -> Self {
        let radii = cfg.radii(scheme);
        let terms = cfg
            .small_tiers
            .iter()
            .zip(&radii.ms)
            .map(|(t, r)| (PI * t.density * r * r, cfg.macro_tier.alpha / t.alpha))
            .collect();
        XiFunctions {
            macro_density: cfg.macro_tier.density,
            psi_inf: assoc_prob_macro_asymptotic(scheme, cfg).raw,
            terms,
        }
    }

    pub fn psi_inf(&self) -> f64 {
        self.psi_inf
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let pl = PI * self.macro_density;
        let correction: f64 = self.terms.iter().map(|(c, p)| c * x.powf(2.0 * p)).sum();
        2.0 * pl * x * (-pl * x * x).exp() * (1.0 - correction) / self.psi_inf
    }

    /// `∫ x^e f(x) dx` over `[0, c]` (lower) or `[c, ∞)` (upper).
    fn moment(&self, limit: f64, e: f64, upper: bool) -> Result<f64> {
        let pl = PI * self.macro_density;
        let z = pl * limit * limit;
        let piece = |shape: f64| -> Result<f64> {
            if upper {
                if limit.is_infinite() {
                    Ok(0.0)
                } else {
                    upper_incomplete_gamma_ext(shape, z)
                }
            } else if limit.is_infinite() {
                Ok(crate::specialfn::gamma(shape))
            } else {
                lower_incomplete_gamma(shape, z)
            }
        };
        let h = e / 2.0;
        let mut value = piece(1.0 + h)? / pl.powf(h);
        for &(c, p) in &self.terms {
            value -= c * piece(1.0 + p + h)? / pl.powf(p + h);
        }
        Ok(value / self.psi_inf)
    }

    /// Ξ₁(x) = ∫₀ˣ f.
    pub fn xi1(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Ok(0.0);
        }
        self.moment(x, 0.0, false)
    }

    /// Ξ₂(a, b) = ∫_a^∞ x^b f.
    pub fn xi2(&self, a: f64, b: f64) -> Result<f64> {
        if !(a > 0.0) {
            if 1.0 + b / 2.0 <= 0.0 {
                return Err(Error::domain("xi2", format!("moment of order {b} diverges at the origin")));
            }
            return self.moment(f64::INFINITY, b, false);
        }
        self.moment(a, b, true)
    }

    /// Ξ₃(c, e) = ∫₀^c x^e f.
    pub fn xi3(&self, c: f64, e: f64) -> Result<f64> {
        if 1.0 + e / 2.0 <= 0.0 {
            return Err(Error::domain("xi3", format!("moment of order {e} diverges at the origin")));
        }
        if c <= 0.0 {
            return Ok(0.0);
        }
        self.moment(c, e, false)
    }
}

/// Large-N closed form of the average macro-user energy.
pub fn avg_energy_macro_asymptotic(scheme: Scheme, cfg: &NetworkConfig) -> Result<AsymptoticEnergy> {
    cfg.validate()?;
    let xi = XiFunctions::new(cfg, scheme);
    let prob = assoc_prob_macro_asymptotic(scheme, cfg);
    let sys = &cfg.system;
    let m = &cfg.macro_tier;
    let d = sys.reference_distance;
    let scale = sys.eta * sys.harvest_time();
    let am = m.alpha;

    let path = sys.beta * (d.powf(-am) * xi.xi1(d)? + xi.xi2(d, -am)?);
    let per_user = m.power / f64::from(m.users) * path;
    let directed = f64::from(m.antennas) * per_user;
    let isotropic = f64::from(m.users - 1) * per_user;

    let ambient_macro = m.power * sys.beta * 2.0 * PI * m.density
        * (d.powf(2.0 - am) * am / (2.0 * (am - 2.0)) * xi.xi1(d)? - d.powf(-am) / 2.0 * xi.xi3(d, 2.0)?
            + xi.xi2(d, 2.0 - am)? / (am - 2.0));

    let radii = cfg.radii(scheme);
    let mut ambient_small = 0.0;
    for (t, &r) in cfg.small_tiers.iter().zip(&radii.ms) {
        let ai = t.alpha;
        let p = am / ai;
        let d_o = (d / r).powf(1.0 / p);
        ambient_small += t.power * sys.beta * 2.0 * PI * t.density
            * (d.powf(2.0 - ai) * ai / (2.0 * (ai - 2.0)) * xi.xi1(d_o)?
                - d.powf(-ai) * r * r / 2.0 * xi.xi3(d_o, 2.0 * p)?
                + r.powf(2.0 - ai) / (ai - 2.0) * xi.xi2(d_o, p * (2.0 - ai))?);
    }

    Ok(AsymptoticEnergy {
        energy: EnergyBreakdown::new(directed, isotropic, ambient_macro, ambient_small).scaled(scale),
        prob,
    })
}
