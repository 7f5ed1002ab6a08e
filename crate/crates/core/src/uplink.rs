//! Uplink transmission powered by harvested energy.
//!
//! Every user spends its average harvested energy during the uplink phase, so
//! its transmit power is `Ē / ((1 − τ)T)`. Interfering users of the macro tier
//! form a Poisson process of density `S λ_M`, those of small tier `i` one of
//! density `λ_i`. Interference seen at a station is attenuated with the
//! path-loss exponent of the receiving tier.

use std::cell::RefCell;
use std::f64::consts::{LN_2, PI};

use serde::{Deserialize, Serialize};

use crate::association::{AssociationResult, ServingDistance};
use crate::energy::EnergyModel;
use crate::error::{Error, Result};
use crate::model::{NetworkConfig, Scheme, Tier};
use crate::specialfn::{gauss_2f1_negz, integrate_piecewise, integrate_semi_infinite, QuadratureSpec};

/// Stable uplink transmit powers in watts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UplinkPowers {
    pub scheme: Scheme,
    pub p_macro: f64,
    pub p_tier: Vec<f64>,
}

impl UplinkPowers {
    pub fn get(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.p_macro,
            Tier::Small(k) => self.p_tier[k],
        }
    }

    /// Powers that spend the given per-tier average energies over the uplink
    /// phase.
    pub fn from_energies(scheme: Scheme, cfg: &NetworkConfig, macro_energy: f64, tier_energy: &[f64]) -> Result<Self> {
        let duration = cfg.system.uplink_time();
        if !(duration > 0.0) {
            return Err(Error::domain("stable_powers", "tau = 1 leaves no time for uplink transmission"));
        }
        Ok(UplinkPowers {
            scheme,
            p_macro: macro_energy / duration,
            p_tier: tier_energy.iter().map(|e| e / duration).collect(),
        })
    }
}

/// Network-wide average uplink rate and the per-tier terms it mixes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HetNetRate {
    pub scheme: Scheme,
    pub association: AssociationResult,
    pub powers: UplinkPowers,
    pub rate_macro: f64,
    pub rate_tier: Vec<f64>,
    pub total: f64,
}

impl HetNetRate {
    pub fn rate(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.rate_macro,
            Tier::Small(k) => self.rate_tier[k],
        }
    }
}

pub fn stable_powers(scheme: Scheme, cfg: &NetworkConfig) -> Result<UplinkPowers> {
    stable_powers_with(scheme, cfg, &QuadratureSpec::default())
}

pub fn stable_powers_with(scheme: Scheme, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<UplinkPowers> {
    cfg.validate()?;
    if !(cfg.system.uplink_time() > 0.0) {
        return Err(Error::domain("stable_powers", "tau = 1 leaves no time for uplink transmission"));
    }
    let model = EnergyModel::new(cfg, scheme);
    let assoc = model.serving().association(spec)?;
    let e_macro = model.average(Tier::Macro, assoc.prob_macro, spec)?.total;
    let e_tier = assoc
        .prob_tier
        .iter()
        .enumerate()
        .map(|(k, &p)| model.average(Tier::Small(k), p, spec).map(|e| e.total))
        .collect::<Result<Vec<_>>>()?;
    UplinkPowers::from_energies(scheme, cfg, e_macro, &e_tier)
}

/// Rate analytics of one scheme at fixed transmit powers.
#[derive(Debug, Clone)]
pub struct UplinkModel<'a> {
    cfg: &'a NetworkConfig,
    serving: ServingDistance<'a>,
    powers: UplinkPowers,
}

impl<'a> UplinkModel<'a> {
    pub fn new(cfg: &'a NetworkConfig, powers: UplinkPowers) -> Self {
        UplinkModel {
            cfg,
            serving: ServingDistance::new(cfg, powers.scheme),
            powers,
        }
    }

    pub fn powers(&self) -> &UplinkPowers {
        &self.powers
    }

    pub fn serving(&self) -> &ServingDistance<'a> {
        &self.serving
    }

    /// Interferer processes as `(density, transmit power)`: macro users first.
    fn interferers(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let m = &self.cfg.macro_tier;
        std::iter::once((f64::from(m.users) * m.density, self.powers.p_macro)).chain(
            self.cfg
                .small_tiers
                .iter()
                .zip(&self.powers.p_tier)
                .map(|(t, &p)| (t.density, p)),
        )
    }

    /// Mean interference plus noise at a macro station, using the law of large
    /// numbers for the interferer fading.
    pub fn macro_interference_plus_noise(&self) -> f64 {
        let sys = &self.cfg.system;
        let a = self.cfg.macro_tier.alpha;
        let d = sys.reference_distance;
        let weighted: f64 = self.interferers().map(|(lambda, p)| lambda * p).sum();
        2.0 * PI * sys.beta * weighted * (d.powf(2.0 - a) / 2.0 + d.powf(2.0 - a) / (a - 2.0)) + sys.noise_power
    }

    /// Lower bound on the macro user's rate at serving distance `x`, in
    /// bits/s/Hz.
    pub fn rate_lb_macro_conditional(&self, x: f64) -> f64 {
        let m = &self.cfg.macro_tier;
        let signal = self.powers.p_macro * m.gain_ul() * self.cfg.path_loss(Tier::Macro, x);
        (1.0 - self.cfg.system.tau) * (signal / self.macro_interference_plus_noise()).ln_1p() / LN_2
    }

    /// Laplace exponent of the aggregate uplink interference at a station whose
    /// path-loss exponent is `alpha`: `Ω(s) = −ln E[e^(−s I)]`.
    pub fn omega(&self, s: f64, alpha: f64) -> Result<f64> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let sys = &self.cfg.system;
        let d = sys.reference_distance;
        let b = (alpha - 2.0) / alpha;
        let c = 2.0 - 2.0 / alpha;
        let mut total = 0.0;
        for (lambda, p) in self.interferers() {
            let w = s * p * sys.beta * d.powf(-alpha);
            if w == 0.0 {
                continue;
            }
            let near = PI * lambda * w / (1.0 + w) * d * d;
            let far = 2.0 * PI * lambda * s * p * sys.beta * d.powf(2.0 - alpha) / (alpha - 2.0)
                * gauss_2f1_negz(1.0, b, c, -w)?;
            total += near + far;
        }
        Ok(total)
    }

    /// P(SINR > threshold) for a tier-`k` user at serving distance `y`.
    pub fn sinr_ccdf(&self, k: usize, y: f64, threshold: f64) -> Result<f64> {
        if threshold <= 0.0 {
            return Ok(1.0);
        }
        let tier = Tier::Small(k);
        let received = self.powers.p_tier[k] * self.cfg.path_loss(tier, y);
        if !(received > 0.0) {
            return Ok(0.0);
        }
        let s = threshold / received;
        let noise_term = s * self.cfg.system.noise_power;
        // exp(−745) underflows; skip the interference term.
        if noise_term > 745.0 {
            return Ok(0.0);
        }
        Ok((-noise_term - self.omega(s, self.cfg.alpha(tier))?).exp())
    }

    /// Rate of a tier-`k` user at serving distance `y`, in bits/s/Hz.
    pub fn rate_tier_conditional(&self, k: usize, y: f64, spec: &QuadratureSpec) -> Result<f64> {
        let factor = 1.0 - self.cfg.system.tau;
        if factor == 0.0 {
            return Ok(0.0);
        }
        // ∫₀^∞ P(SINR > x)/(1 + x) dx with x = e^u − 1.
        let failure = RefCell::new(None);
        let integral = integrate_semi_infinite(
            |u| match self.sinr_ccdf(k, y, u.exp_m1()) {
                Ok(v) => v,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            },
            0.0,
            1.0,
            spec,
        );
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(factor * integral? / LN_2)
    }

    pub fn avg_rate_macro(&self, prob: f64, spec: &QuadratureSpec) -> Result<f64> {
        let d = self.cfg.system.reference_distance;
        let f = |x: f64| self.rate_lb_macro_conditional(x) * self.serving.joint_density(Tier::Macro, x);
        Ok(integrate_piecewise(f, &[0.0, d], f64::INFINITY, self.cfg.length_scale(), spec)? / prob)
    }

    pub fn avg_rate_tier(&self, k: usize, prob: f64, spec: &QuadratureSpec) -> Result<f64> {
        let d = self.cfg.system.reference_distance;
        let tier = Tier::Small(k);
        let inner = spec.with_rel_tol((spec.rel_tol * 10.0).max(1e-9));
        let failure = RefCell::new(None);
        let f = |y: f64| {
            let density = self.serving.joint_density(tier, y);
            if density == 0.0 {
                return 0.0;
            }
            match self.rate_tier_conditional(k, y, &inner) {
                Ok(r) => r * density,
                Err(e) => {
                    failure.borrow_mut().get_or_insert(e);
                    f64::NAN
                }
            }
        };
        let integral = integrate_piecewise(f, &[0.0, d], f64::INFINITY, self.cfg.length_scale(), spec);
        if let Some(e) = failure.into_inner() {
            return Err(e);
        }
        Ok(integral? / prob)
    }
}

pub fn rate_lb_macro_conditional(scheme: Scheme, x: f64, cfg: &NetworkConfig) -> Result<f64> {
    Ok(UplinkModel::new(cfg, stable_powers(scheme, cfg)?).rate_lb_macro_conditional(x))
}

pub fn sinr_ccdf_tier_k(scheme: Scheme, k: usize, y: f64, threshold: f64, cfg: &NetworkConfig) -> Result<f64> {
    UplinkModel::new(cfg, stable_powers(scheme, cfg)?).sinr_ccdf(k, y, threshold)
}

pub fn omega(s: f64, alpha: f64, cfg: &NetworkConfig, powers: &UplinkPowers) -> Result<f64> {
    UplinkModel::new(cfg, powers.clone()).omega(s, alpha)
}

pub fn rate_tier_k_conditional(scheme: Scheme, k: usize, y: f64, cfg: &NetworkConfig) -> Result<f64> {
    UplinkModel::new(cfg, stable_powers(scheme, cfg)?).rate_tier_conditional(k, y, &QuadratureSpec::default())
}

pub fn avg_rate_macro(scheme: Scheme, cfg: &NetworkConfig) -> Result<f64> {
    let spec = QuadratureSpec::default();
    let model = UplinkModel::new(cfg, stable_powers_with(scheme, cfg, &spec)?);
    let prob = model.serving().probability(Tier::Macro, &spec)?;
    model.avg_rate_macro(prob, &spec)
}

pub fn avg_rate_tier_k(scheme: Scheme, k: usize, cfg: &NetworkConfig) -> Result<f64> {
    let spec = QuadratureSpec::default();
    let model = UplinkModel::new(cfg, stable_powers_with(scheme, cfg, &spec)?);
    let prob = model.serving().probability(Tier::Small(k), &spec)?;
    model.avg_rate_tier(k, prob, &spec)
}

pub fn hetnet_avg_rate(scheme: Scheme, cfg: &NetworkConfig) -> Result<HetNetRate> {
    hetnet_avg_rate_with(scheme, cfg, &QuadratureSpec::default())
}

pub fn hetnet_avg_rate_with(scheme: Scheme, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<HetNetRate> {
    let powers = stable_powers_with(scheme, cfg, spec)?;
    hetnet_avg_rate_at(cfg, powers, spec)
}

/// Network-wide rate with the transmit powers held at the given values.
pub fn hetnet_avg_rate_at(cfg: &NetworkConfig, powers: UplinkPowers, spec: &QuadratureSpec) -> Result<HetNetRate> {
    cfg.validate()?;
    let scheme = powers.scheme;
    let model = UplinkModel::new(cfg, powers);
    let association = model.serving().association(spec)?;
    let rate_macro = model.avg_rate_macro(association.prob_macro, spec)?;
    let rate_tier = association
        .prob_tier
        .iter()
        .enumerate()
        .map(|(k, &p)| model.avg_rate_tier(k, p, spec))
        .collect::<Result<Vec<_>>>()?;
    let total = association.prob_macro * rate_macro
        + association.prob_tier.iter().zip(&rate_tier).map(|(p, r)| p * r).sum::<f64>();
    Ok(HetNetRate {
        scheme,
        association,
        powers: model.powers.clone(),
        rate_macro,
        rate_tier,
        total,
    })
}
