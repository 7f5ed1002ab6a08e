//! Network description: system constants, tiers, association schemes and the
//! bias radii that turn the association rules into distance comparisons.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Global constants shared by every tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    /// Propagation constant β, (c / 4π f_c)².
    pub beta: f64,
    /// Reference distance d in meters; path loss is clamped inside it.
    pub reference_distance: f64,
    /// RF-to-DC conversion efficiency η.
    pub eta: f64,
    /// Fraction τ of each block spent on power transfer.
    pub tau: f64,
    /// Block duration T in seconds.
    pub block_time: f64,
    /// Receiver noise power δ² in watts.
    pub noise_power: f64,
}

impl SystemParams {
    pub fn validate(&self) -> Result<()> {
        check(self.beta > 0.0 && self.beta.is_finite(), || format!("beta = {} must be positive", self.beta))?;
        check(self.reference_distance > 0.0 && self.reference_distance.is_finite(), || {
            format!("reference distance = {} must be positive", self.reference_distance)
        })?;
        check(self.eta > 0.0 && self.eta < 1.0, || format!("eta = {} must lie in (0, 1)", self.eta))?;
        check((0.0..=1.0).contains(&self.tau), || format!("tau = {} must lie in [0, 1]", self.tau))?;
        check(self.block_time > 0.0 && self.block_time.is_finite(), || {
            format!("block time = {} must be positive", self.block_time)
        })?;
        check(self.noise_power > 0.0 && self.noise_power.is_finite(), || {
            format!("noise power = {} must be positive", self.noise_power)
        })
    }

    /// Duration of the power-transfer phase, τT.
    pub fn harvest_time(&self) -> f64 {
        self.tau * self.block_time
    }

    /// Duration of the uplink phase, (1 − τ)T.
    pub fn uplink_time(&self) -> f64 {
        (1.0 - self.tau) * self.block_time
    }
}

/// Massive-MIMO macro tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MacroTier {
    /// Base-station density λ_M per m².
    pub density: f64,
    /// Transmit power P_M in watts.
    pub power: f64,
    /// Path-loss exponent α_M.
    pub alpha: f64,
    /// Antennas per base station, N.
    pub antennas: u32,
    /// Users served simultaneously per base station, S.
    pub users: u32,
}

impl MacroTier {
    /// Downlink array gain N + S − 1.
    pub fn gain_dl(&self) -> f64 {
        f64::from(self.antennas) + f64::from(self.users) - 1.0
    }

    /// Uplink array gain N − S + 1.
    pub fn gain_ul(&self) -> f64 {
        f64::from(self.antennas) - f64::from(self.users) + 1.0
    }

    pub fn validate(&self) -> Result<()> {
        check(self.density > 0.0 && self.density.is_finite(), || {
            format!("macro density = {} must be positive", self.density)
        })?;
        check(self.power > 0.0 && self.power.is_finite(), || format!("macro power = {} must be positive", self.power))?;
        check(self.alpha > 2.0 && self.alpha.is_finite(), || {
            format!("macro path-loss exponent = {} must exceed 2", self.alpha)
        })?;
        check(self.users >= 1 && self.users < self.antennas, || {
            format!("need 1 <= users < antennas, got S = {}, N = {}", self.users, self.antennas)
        })
    }
}

/// Single-antenna small-cell tier.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmallTier {
    pub density: f64,
    pub power: f64,
    pub alpha: f64,
}

impl SmallTier {
    pub fn validate(&self, index: usize) -> Result<()> {
        let name = Tier::Small(index);
        check(self.density > 0.0 && self.density.is_finite(), || {
            format!("{name} density = {} must be positive", self.density)
        })?;
        check(self.power > 0.0 && self.power.is_finite(), || {
            format!("{name} power = {} must be positive", self.power)
        })?;
        check(self.alpha > 2.0 && self.alpha.is_finite(), || {
            format!("{name} path-loss exponent = {} must exceed 2", self.alpha)
        })
    }
}

/// User association rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Scheme {
    /// Maximum downlink received signal power.
    Drsp,
    /// Maximum uplink received signal power (array-gain compensated path loss).
    Ursp,
}

impl Scheme {
    pub const ALL: [Scheme; 2] = [Scheme::Drsp, Scheme::Ursp];
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Drsp => "DRSP",
            Scheme::Ursp => "URSP",
        })
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "drsp" => Ok(Scheme::Drsp),
            "ursp" => Ok(Scheme::Ursp),
            _ => Err(Error::InvalidConfig(format!("unknown scheme '{s}' (expected DRSP or URSP)"))),
        }
    }
}

/// A tier of the network. Small tiers are indexed from 0 in configuration
/// order and displayed as `tier2`, `tier3`, ...
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Tier {
    Macro,
    Small(usize),
}

impl fmt::Display for Tier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tier::Macro => f.write_str("macro"),
            Tier::Small(k) => write!(f, "tier{}", k + 2),
        }
    }
}

/// Bias radii for both schemes together with the two array gains.
///
/// Under a scheme, a user served by the macro tier at distance `x` requires
/// every tier-`i` station to lie beyond `r_ms(i) * x^(α_M/α_i)`; a user served
/// by tier `k` at `y` requires macro stations beyond `r_sm(k) * y^(α_k/α_M)`
/// and tier-`i` stations beyond `r_ss(k, i) * y^(α_k/α_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BiasRadii {
    pub gain_dl: f64,
    pub gain_ul: f64,
    pub r_ms_hat: Vec<f64>,
    pub r_sm_hat: Vec<f64>,
    /// Indexed `[k][i]`.
    pub r_ss_hat: Vec<Vec<f64>>,
    pub r_ms_tilde: Vec<f64>,
    pub r_sm_tilde: f64,
}

impl BiasRadii {
    /// The radii that apply under `scheme`.
    pub fn scheme(&self, scheme: Scheme) -> SchemeRadii {
        match scheme {
            Scheme::Drsp => SchemeRadii {
                ms: self.r_ms_hat.clone(),
                sm: self.r_sm_hat.clone(),
                ss: self.r_ss_hat.clone(),
            },
            Scheme::Ursp => {
                let k = self.r_ms_tilde.len();
                SchemeRadii {
                    ms: self.r_ms_tilde.clone(),
                    sm: vec![self.r_sm_tilde; k],
                    ss: vec![vec![1.0; k]; k],
                }
            }
        }
    }
}

/// Bias radii of a single scheme, indexed by small tier.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeRadii {
    pub ms: Vec<f64>,
    pub sm: Vec<f64>,
    pub ss: Vec<Vec<f64>>,
}

/// Complete network description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub system: SystemParams,
    pub macro_tier: MacroTier,
    pub small_tiers: Vec<SmallTier>,
}

impl NetworkConfig {
    pub fn new(system: SystemParams, macro_tier: MacroTier, small_tiers: Vec<SmallTier>) -> Result<Self> {
        let cfg = NetworkConfig {
            system,
            macro_tier,
            small_tiers,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        self.macro_tier.validate()?;
        for (i, t) in self.small_tiers.iter().enumerate() {
            t.validate(i)?;
        }
        Ok(())
    }

    pub fn tiers(&self) -> impl Iterator<Item = Tier> + '_ {
        std::iter::once(Tier::Macro).chain((0..self.small_tiers.len()).map(Tier::Small))
    }

    pub fn alpha(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.macro_tier.alpha,
            Tier::Small(k) => self.small_tiers[k].alpha,
        }
    }

    pub fn density(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.macro_tier.density,
            Tier::Small(k) => self.small_tiers[k].density,
        }
    }

    pub fn power(&self, tier: Tier) -> f64 {
        match tier {
            Tier::Macro => self.macro_tier.power,
            Tier::Small(k) => self.small_tiers[k].power,
        }
    }

    pub fn bias_radii(&self) -> BiasRadii {
        derive_bias_radii(&self.macro_tier, &self.small_tiers)
    }

    pub fn radii(&self, scheme: Scheme) -> SchemeRadii {
        self.bias_radii().scheme(scheme)
    }

    /// Typical nearest-station distance of the superposed network, used as the
    /// first block length for semi-infinite integrals.
    pub fn length_scale(&self) -> f64 {
        let total: f64 = self.macro_tier.density + self.small_tiers.iter().map(|t| t.density).sum::<f64>();
        1.0 / (PI * total).sqrt()
    }

    /// Path loss β·max{r, d}^(−α) for a link of the given tier.
    pub fn path_loss(&self, tier: Tier, r: f64) -> f64 {
        path_loss(r, self.alpha(tier), &self.system)
    }
}

/// β·max{dist, d}^(−α).
pub fn path_loss(dist: f64, alpha: f64, sys: &SystemParams) -> f64 {
    sys.beta * dist.max(sys.reference_distance).powf(-alpha)
}

pub fn derive_bias_radii(macro_tier: &MacroTier, tiers: &[SmallTier]) -> BiasRadii {
    let g_dl = macro_tier.gain_dl();
    let g_ul = macro_tier.gain_ul();
    let s = f64::from(macro_tier.users);
    let pm = macro_tier.power;
    let am = macro_tier.alpha;
    BiasRadii {
        gain_dl: g_dl,
        gain_ul: g_ul,
        r_ms_hat: tiers.iter().map(|t| (g_dl * pm / (s * t.power)).powf(-1.0 / t.alpha)).collect(),
        r_sm_hat: tiers.iter().map(|t| (s * t.power / (g_dl * pm)).powf(-1.0 / am)).collect(),
        r_ss_hat: tiers
            .iter()
            .map(|tk| tiers.iter().map(|ti| (tk.power / ti.power).powf(-1.0 / ti.alpha)).collect())
            .collect(),
        r_ms_tilde: tiers.iter().map(|t| g_ul.powf(-1.0 / t.alpha)).collect(),
        r_sm_tilde: (1.0 / g_ul).powf(-1.0 / am),
    }
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * watts.log10() + 30.0
}

/// β = (c / 4π f_c)².
pub fn beta_from_carrier(frequency_hz: f64) -> f64 {
    (SPEED_OF_LIGHT / (4.0 * PI * frequency_hz)).powi(2)
}

fn check(ok: bool, message: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidConfig(message()))
    }
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn path_loss_examples() {
        let mut sys = system();
        sys.beta = 1.0;
        assert_eq!(path_loss(0.0, 3.0, &sys), 1.0);
        assert_eq!(path_loss(1.0, 3.0, &sys), 1.0);
        sys.beta = 5.7e-4;
        assert!((path_loss(2.0, 3.0, &sys) - 5.7e-4 / 8.0).abs() < 1e-18);
    }

    #[test]
    fn beta_at_one_gigahertz() {
        assert!((beta_from_carrier(1e9) - 5.69e-4).abs() < 1e-6);
    }

    #[test]
    fn dbm_round_trip() {
        assert!((dbm_to_watts(46.0) - 39.810_717_055_349_73).abs() < 1e-9);
        assert!((dbm_to_watts(30.0) - 1.0).abs() < 1e-15);
        assert!((watts_to_dbm(dbm_to_watts(-90.0)) + 90.0).abs() < 1e-9);
    }

    #[test]
    fn radii_example() {
        let cfg = two_tier(100, 10, 3.5, 4.0, 5.0, 30.0);
        let r = cfg.bias_radii();
        assert_eq!(r.gain_dl, 109.0);
        assert_eq!(r.gain_ul, 91.0);
        let expected = (109.0 * dbm_to_watts(46.0) / (10.0 * 1.0)).powf(-0.25);
        assert!((r.r_ms_hat[0] - expected).abs() < 1e-15);
        assert_eq!(r.r_ss_hat[0][0], 1.0);
        assert!((r.r_ms_tilde[0] - 91f64.powf(-0.25)).abs() < 1e-15);
        assert!((r.r_sm_tilde - 91f64.powf(1.0 / 3.5)).abs() < 1e-12);
    }

    #[test]
    fn smallest_legal_uplink_gain() {
        let cfg = two_tier(6, 5, 3.5, 4.0, 5.0, 30.0);
        assert_eq!(cfg.bias_radii().gain_ul, 2.0);
    }

    #[test]
    fn ursp_small_small_radius_is_one() {
        let mut cfg = two_tier(64, 4, 3.0, 3.5, 5.0, 30.0);
        cfg.small_tiers.push(SmallTier {
            density: 1e-2,
            power: 0.1,
            alpha: 4.0,
        });
        let u = cfg.radii(Scheme::Ursp);
        assert!(u.ss.iter().flatten().all(|&r| r == 1.0));
        let d = cfg.radii(Scheme::Drsp);
        assert_eq!(d.ss[0][0], 1.0);
        assert!(d.ss[0][1] < 1.0 && d.ss[1][0] > 1.0);
    }

    #[test]
    fn validation_rejects_bad_values() {
        let good = two_tier(64, 4, 3.0, 3.5, 5.0, 30.0);
        let mut c = good.clone();
        c.macro_tier.alpha = 2.0;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.macro_tier.users = 64;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.small_tiers[0].density = 0.0;
        assert!(c.validate().is_err());
        let mut c = good.clone();
        c.system.eta = 1.0;
        assert!(c.validate().is_err());
        let mut c = good;
        c.system.tau = 1.5;
        assert!(c.validate().is_err());
    }

    #[test]
    fn scheme_and_tier_names() {
        assert_eq!("ursp".parse::<Scheme>().unwrap(), Scheme::Ursp);
        assert_eq!(Scheme::Drsp.to_string(), "DRSP");
        assert_eq!(Tier::Small(0).to_string(), "tier2");
        assert!("x".parse::<Scheme>().is_err());
    }
}
