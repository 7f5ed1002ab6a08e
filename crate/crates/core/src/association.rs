//! Association probabilities and serving-distance densities.
//!
//! For tier `t` the unnormalized density `g_t(x)` is the probability density
//! of the nearest tier-`t` station lying at `x` times the probability that no
//! competing station beats it. Its integral is the association probability
//! `Ψ_t` and `g_t / Ψ_t` is the serving-distance density.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{NetworkConfig, Scheme, SchemeRadii, Tier};
use crate::specialfn::{gamma, integrate_semi_infinite, QuadratureSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssociationResult {
    pub scheme: Scheme,
    pub prob_macro: f64,
    pub prob_tier: Vec<f64>,
}

impl AssociationResult {
    pub fn prob(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.prob_macro,
            Tier::Small(k) => self.prob_tier[k],
        }
    }

    /// Sum over all tiers; one up to quadrature error.
    pub fn total(&self) -> f64 {
        self.prob_macro + self.prob_tier.iter().sum::<f64>()
    }
}

/// Large-N approximation of the macro association probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticProb {
    /// Value clamped to [0, 1].
    pub value: f64,
    /// Unclamped first-order expression.
    pub raw: f64,
    /// False when the raw value fell outside [0, 1].
    pub in_regime: bool,
}

/// Serving-distance model of one scheme.
#[derive(Debug, Clone)]
pub struct ServingDistance<'a> {
    cfg: &'a NetworkConfig,
    scheme: Scheme,
    radii: SchemeRadii,
}

impl<'a> ServingDistance<'a> {
    pub fn new(cfg: &'a NetworkConfig, scheme: Scheme) -> Self {
        ServingDistance {
            cfg,
            scheme,
            radii: cfg.radii(scheme),
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn radii(&self) -> &SchemeRadii {
        &self.radii
    }

    /// Exclusion radius that tier `other` must respect when the user is served
    /// by `serving` at distance `x`.
    pub fn exclusion_radius(&self, serving: Tier, other: Tier, x: f64) -> f64 {
        let a_srv = self.cfg.alpha(serving);
        let a_other = self.cfg.alpha(other);
        let bias = match (serving, other) {
            (Tier::Macro, Tier::Macro) => 1.0,
            (Tier::Macro, Tier::Small(i)) => self.radii.ms[i],
            (Tier::Small(k), Tier::Macro) => self.radii.sm[k],
            (Tier::Small(k), Tier::Small(i)) => self.radii.ss[k][i],
        };
        bias * x.powf(a_srv / a_other)
    }

    /// Unnormalized density `g_t(x)`.
    pub fn joint_density(&self, tier: Tier, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let exponent: f64 = self
            .cfg
            .tiers()
            .map(|other| {
                let r = self.exclusion_radius(tier, other, x);
                PI * self.cfg.density(other) * r * r
            })
            .sum();
        2.0 * PI * self.cfg.density(tier) * x * (-exponent).exp()
    }

    pub fn probability(&self, tier: Tier, spec: &QuadratureSpec) -> Result<f64> {
        integrate_semi_infinite(|x| self.joint_density(tier, x), 0.0, self.cfg.length_scale(), spec)
    }

    pub fn association(&self, spec: &QuadratureSpec) -> Result<AssociationResult> {
        let prob_macro = self.probability(Tier::Macro, spec)?;
        let prob_tier = (0..self.cfg.small_tiers.len())
            .map(|k| self.probability(Tier::Small(k), spec))
            .collect::<Result<Vec<_>>>()?;
        Ok(AssociationResult {
            scheme: self.scheme,
            prob_macro,
            prob_tier,
        })
    }

    /// Serving-distance density given the tier's association probability.
    pub fn pdf(&self, tier: Tier, x: f64, prob: f64) -> f64 {
        self.joint_density(tier, x) / prob
    }
}

/// Association probabilities of every tier, each by its own quadrature.
pub fn assoc_prob(scheme: Scheme, cfg: &NetworkConfig) -> Result<AssociationResult> {
    assoc_prob_with(scheme, cfg, &QuadratureSpec::default())
}

pub fn assoc_prob_with(scheme: Scheme, cfg: &NetworkConfig, spec: &QuadratureSpec) -> Result<AssociationResult> {
    cfg.validate()?;
    ServingDistance::new(cfg, scheme).association(spec)
}

/// Normalized serving-distance density of `tier` at `x`.
pub fn serving_distance_pdf(scheme: Scheme, tier: Tier, x: f64, cfg: &NetworkConfig) -> Result<f64> {
    cfg.validate()?;
    let model = ServingDistance::new(cfg, scheme);
    let prob = model.probability(tier, &QuadratureSpec::default())?;
    Ok(model.pdf(tier, x, prob))
}

/// First-order large-N macro association probability
/// `1 − π Σ λ_i r_MS² Γ(1 + α_M/α_i) / (π λ_M)^(α_M/α_i)`.
pub fn assoc_prob_macro_asymptotic(scheme: Scheme, cfg: &NetworkConfig) -> AsymptoticProb {
    let raw = 1.0 - asymptotic_deficit(cfg, &cfg.radii(scheme).ms);
    AsymptoticProb {
        value: raw.clamp(0.0, 1.0),
        raw,
        in_regime: (0.0..=1.0).contains(&raw),
    }
}

pub(crate) fn asymptotic_deficit(cfg: &NetworkConfig, r_ms: &[f64]) -> f64 {
    let m = &cfg.macro_tier;
    cfg.small_tiers
        .iter()
        .zip(r_ms)
        .map(|(t, r)| {
            let p = m.alpha / t.alpha;
            PI * t.density * r * r * gamma(1.0 + p) / (PI * m.density).powf(p)
        })
        .sum()
}
