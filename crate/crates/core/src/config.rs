//! TOML configuration files.
//!
//! ```toml
//! [system]
//! carrier_frequency_hz = 1e9   # or: beta = 5.7e-4
//! reference_distance = 1.0     # meters, default 1
//! eta = 0.9
//! tau = 0.6
//! block_time = 1.0             # seconds, default 1
//! noise_dbm = -90.0            # or: noise_w
//!
//! [macro]
//! density = 1e-3               # per square meter
//! power_dbm = 46.0             # or: power_w
//! alpha = 3.0
//! antennas = 128
//! users = 20
//!
//! [[small_tier]]               # repeat for further tiers
//! density_ratio = 20.0         # relative to the macro density; or: density
//! power_dbm = 30.0
//! alpha = 3.5
//!
//! [sweep]                      # optional
//! variable = "n_antennas"      # n_antennas | n_users | tier_density | tier_power
//! values = [64, 128, 256]      # tier_density in m^-2, tier_power in dBm
//! tier = 2                     # small tier swept by tier_density / tier_power
//! schemes = ["DRSP", "URSP"]
//! outputs = ["assoc", "energy", "rate"]
//! mc_validation = false
//! seeds = [1]
//! ```
//!
//! Errors carry the line and column of the offending value.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::error::{Error, Result};
use crate::model::{
    beta_from_carrier, dbm_to_watts, MacroTier, NetworkConfig, Scheme, SmallTier, SystemParams,
};

/// Parameter varied by a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    NAntennas,
    NUsers,
    TierDensity,
    TierPower,
}

impl SweepVariable {
    pub fn name(&self) -> &'static str {
        match self {
            SweepVariable::NAntennas => "n_antennas",
            SweepVariable::NUsers => "n_users",
            SweepVariable::TierDensity => "tier_density",
            SweepVariable::TierPower => "tier_power",
        }
    }
}

impl fmt::Display for SweepVariable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SweepVariable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "n_antennas" => Ok(SweepVariable::NAntennas),
            "n_users" => Ok(SweepVariable::NUsers),
            "tier_density" => Ok(SweepVariable::TierDensity),
            "tier_power" => Ok(SweepVariable::TierPower),
            _ => Err(Error::InvalidConfig(format!(
                "unknown sweep variable '{s}' (expected n_antennas, n_users, tier_density or tier_power)"
            ))),
        }
    }
}

/// Quantity family computed for each sweep point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Assoc,
    Energy,
    Rate,
}

impl Output {
    pub const ALL: [Output; 3] = [Output::Assoc, Output::Energy, Output::Rate];
}

impl fmt::Display for Output {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Output::Assoc => "assoc",
            Output::Energy => "energy",
            Output::Rate => "rate",
        })
    }
}

impl FromStr for Output {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "assoc" => Ok(Output::Assoc),
            "energy" => Ok(Output::Energy),
            "rate" => Ok(Output::Rate),
            _ => Err(Error::InvalidConfig(format!("unknown output '{s}' (expected assoc, energy or rate)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
    /// Small tier index (0-based) swept by the tier variables.
    pub tier: usize,
    pub schemes: Vec<Scheme>,
    pub outputs: Vec<Output>,
    pub mc_validation: bool,
    pub seeds: Vec<u64>,
}

impl SweepSpec {
    /// Checks that the values are nonempty and strictly monotone and that
    /// every value yields a valid network.
    pub fn validate(&self, base: &NetworkConfig) -> Result<()> {
        if self.values.is_empty() {
            return Err(Error::InvalidConfig("sweep values must not be empty".into()));
        }
        let increasing = self.values.windows(2).all(|w| w[1] > w[0]);
        let decreasing = self.values.windows(2).all(|w| w[1] < w[0]);
        if !(increasing || decreasing) {
            return Err(Error::InvalidConfig("sweep values must be strictly monotone".into()));
        }
        if self.outputs.is_empty() || self.schemes.is_empty() {
            return Err(Error::InvalidConfig("sweep needs at least one scheme and one output".into()));
        }
        if matches!(self.variable, SweepVariable::TierDensity | SweepVariable::TierPower)
            && self.tier >= base.small_tiers.len()
        {
            return Err(Error::InvalidConfig(format!(
                "sweep tier {} does not exist",
                self.tier + 2
            )));
        }
        for &v in &self.values {
            self.apply(base, v)?;
        }
        Ok(())
    }

    /// The base network with the swept parameter set to `value`.
    pub fn apply(&self, base: &NetworkConfig, value: f64) -> Result<NetworkConfig> {
        let mut cfg = base.clone();
        let count = |v: f64| -> Result<u32> {
            if v.fract() == 0.0 && (1.0..=f64::from(u32::MAX)).contains(&v) {
                Ok(v as u32)
            } else {
                Err(Error::InvalidConfig(format!("{} value {v} must be a positive integer", self.variable)))
            }
        };
        match self.variable {
            SweepVariable::NAntennas => cfg.macro_tier.antennas = count(value)?,
            SweepVariable::NUsers => cfg.macro_tier.users = count(value)?,
            SweepVariable::TierDensity => cfg.small_tiers[self.tier].density = value,
            SweepVariable::TierPower => cfg.small_tiers[self.tier].power = dbm_to_watts(value),
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// The swept value in SI units (watts for powers).
    pub fn si_value(&self, value: f64) -> f64 {
        match self.variable {
            SweepVariable::TierPower => dbm_to_watts(value),
            _ => value,
        }
    }
}

/// A parsed configuration file.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigFile {
    pub network: NetworkConfig,
    pub sweep: Option<SweepSpec>,
}

type S<T> = Spanned<T>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    system: RawSystem,
    #[serde(rename = "macro")]
    macro_tier: RawMacro,
    #[serde(default)]
    small_tier: Vec<RawSmall>,
    sweep: Option<RawSweep>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSystem {
    carrier_frequency_hz: Option<S<f64>>,
    beta: Option<S<f64>>,
    reference_distance: Option<S<f64>>,
    eta: S<f64>,
    tau: S<f64>,
    block_time: Option<S<f64>>,
    noise_dbm: Option<S<f64>>,
    noise_w: Option<S<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMacro {
    density: S<f64>,
    power_dbm: Option<S<f64>>,
    power_w: Option<S<f64>>,
    alpha: S<f64>,
    antennas: S<u32>,
    users: S<u32>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSmall {
    density: Option<S<f64>>,
    density_ratio: Option<S<f64>>,
    power_dbm: Option<S<f64>>,
    power_w: Option<S<f64>>,
    alpha: S<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    variable: S<String>,
    values: S<Vec<f64>>,
    tier: Option<S<usize>>,
    schemes: Option<S<Vec<String>>>,
    outputs: Option<S<Vec<String>>>,
    #[serde(default)]
    mc_validation: bool,
    seeds: Option<Vec<u64>>,
}

/// Maps byte offsets to 1-based line and column numbers.
struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn position(&self, offset: usize) -> (usize, usize) {
        let before = &self.text[..offset.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
        (line, column)
    }

    fn error(&self, span: Range<usize>, message: impl fmt::Display) -> Error {
        let (line, column) = self.position(span.start);
        Error::InvalidConfig(format!("line {line}, column {column}: {message}"))
    }

    /// Runs a validation and attaches the span of the value it concerns.
    fn check<T>(&self, value: &S<T>, ok: impl FnOnce(&T) -> bool, message: &str) -> Result<()> {
        if ok(value.get_ref()) {
            Ok(())
        } else {
            Err(self.error(value.span(), message))
        }
    }
}

fn one_of<'a>(
    loc: &Locator,
    whole: Range<usize>,
    a: &'a Option<S<f64>>,
    b: &'a Option<S<f64>>,
    names: (&str, &str),
) -> Result<Either<'a>> {
    match (a, b) {
        (Some(x), None) => Ok(Either::First(x)),
        (None, Some(y)) => Ok(Either::Second(y)),
        (Some(_), Some(y)) => Err(loc.error(y.span(), format!("give either {} or {}, not both", names.0, names.1))),
        (None, None) => Err(loc.error(whole, format!("missing {} (or {})", names.0, names.1))),
    }
}

enum Either<'a> {
    First(&'a S<f64>),
    Second(&'a S<f64>),
}

fn finite_positive(v: &f64) -> bool {
    v.is_finite() && *v > 0.0
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let loc = Locator { text };
        let raw: S<RawFile> = toml::from_str(text).map_err(|e| match e.span() {
            Some(span) => loc.error(span, e.message()),
            None => Error::InvalidConfig(e.message().to_string()),
        })?;
        let whole = raw.span();
        let raw = raw.into_inner();

        let s = &raw.system;
        let beta = match one_of(&loc, whole.clone(), &s.beta, &s.carrier_frequency_hz, ("beta", "carrier_frequency_hz"))? {
            Either::First(b) => {
                loc.check(b, finite_positive, "beta must be positive")?;
                *b.get_ref()
            }
            Either::Second(f) => {
                loc.check(f, finite_positive, "carrier frequency must be positive")?;
                beta_from_carrier(*f.get_ref())
            }
        };
        let noise_power = match one_of(&loc, whole.clone(), &s.noise_w, &s.noise_dbm, ("noise_w", "noise_dbm"))? {
            Either::First(w) => {
                loc.check(w, finite_positive, "noise power must be positive")?;
                *w.get_ref()
            }
            Either::Second(dbm) => {
                loc.check(dbm, |v| v.is_finite(), "noise power must be finite")?;
                dbm_to_watts(*dbm.get_ref())
            }
        };
        let reference_distance = match &s.reference_distance {
            Some(d) => {
                loc.check(d, finite_positive, "reference distance must be positive")?;
                *d.get_ref()
            }
            None => 1.0,
        };
        let block_time = match &s.block_time {
            Some(t) => {
                loc.check(t, finite_positive, "block time must be positive")?;
                *t.get_ref()
            }
            None => 1.0,
        };
        loc.check(&s.eta, |v| *v > 0.0 && *v < 1.0, "eta must lie in (0, 1)")?;
        loc.check(&s.tau, |v| (0.0..=1.0).contains(v), "tau must lie in [0, 1]")?;
        let system = SystemParams {
            beta,
            reference_distance,
            eta: *s.eta.get_ref(),
            tau: *s.tau.get_ref(),
            block_time,
            noise_power,
        };

        let m = &raw.macro_tier;
        loc.check(&m.density, finite_positive, "macro density must be positive")?;
        loc.check(&m.alpha, |a| a.is_finite() && *a > 2.0, "path-loss exponent must exceed 2")?;
        loc.check(&m.users, |s| *s >= 1, "users must be at least 1")?;
        loc.check(&m.antennas, |n| *n > *m.users.get_ref(), "antennas must exceed users")?;
        let macro_power = power(&loc, whole.clone(), &m.power_w, &m.power_dbm)?;
        let macro_tier = MacroTier {
            density: *m.density.get_ref(),
            power: macro_power,
            alpha: *m.alpha.get_ref(),
            antennas: *m.antennas.get_ref(),
            users: *m.users.get_ref(),
        };

        let mut small_tiers = Vec::new();
        for t in &raw.small_tier {
            let density = match one_of(&loc, whole.clone(), &t.density, &t.density_ratio, ("density", "density_ratio"))? {
                Either::First(d) => {
                    loc.check(d, finite_positive, "density must be positive")?;
                    *d.get_ref()
                }
                Either::Second(r) => {
                    loc.check(r, finite_positive, "density ratio must be positive")?;
                    r.get_ref() * macro_tier.density
                }
            };
            loc.check(&t.alpha, |a| a.is_finite() && *a > 2.0, "path-loss exponent must exceed 2")?;
            small_tiers.push(SmallTier {
                density,
                power: power(&loc, whole.clone(), &t.power_w, &t.power_dbm)?,
                alpha: *t.alpha.get_ref(),
            });
        }

        let network = NetworkConfig::new(system, macro_tier, small_tiers)?;
        let sweep = raw.sweep.map(|sw| sweep_spec(&loc, sw, &network)).transpose()?;
        Ok(ConfigFile { network, sweep })
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

fn power(loc: &Locator, whole: Range<usize>, watts: &Option<S<f64>>, dbm: &Option<S<f64>>) -> Result<f64> {
    match one_of(loc, whole, watts, dbm, ("power_w", "power_dbm"))? {
        Either::First(w) => {
            loc.check(w, finite_positive, "power must be positive")?;
            Ok(*w.get_ref())
        }
        Either::Second(d) => {
            loc.check(d, |v| v.is_finite(), "power must be finite")?;
            Ok(dbm_to_watts(*d.get_ref()))
        }
    }
}

fn sweep_spec(loc: &Locator, raw: RawSweep, network: &NetworkConfig) -> Result<SweepSpec> {
    let variable: SweepVariable = raw
        .variable
        .get_ref()
        .parse()
        .map_err(|e: Error| loc.error(raw.variable.span(), strip(e)))?;
    let tier = match &raw.tier {
        Some(t) => {
            loc.check(t, |k| *k >= 2, "small tiers are numbered from 2")?;
            t.get_ref() - 2
        }
        None => 0,
    };
    let schemes = match &raw.schemes {
        Some(list) => list
            .get_ref()
            .iter()
            .map(|s| s.parse::<Scheme>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| loc.error(list.span(), strip(e)))?,
        None => Scheme::ALL.to_vec(),
    };
    let outputs = match &raw.outputs {
        Some(list) => list
            .get_ref()
            .iter()
            .map(|s| s.parse::<Output>())
            .collect::<Result<Vec<_>>>()
            .map_err(|e| loc.error(list.span(), strip(e)))?,
        None => vec![Output::Assoc],
    };
    let spec = SweepSpec {
        variable,
        values: raw.values.get_ref().clone(),
        tier,
        schemes,
        outputs,
        mc_validation: raw.mc_validation,
        seeds: raw.seeds.unwrap_or_else(|| vec![1]),
    };
    spec.validate(network).map_err(|e| loc.error(raw.values.span(), strip(e)))?;
    Ok(spec)
}

fn strip(e: Error) -> String {
    match e {
        Error::InvalidConfig(m) => m,
        other => other.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"
[system]
carrier_frequency_hz = 1e9
eta = 0.9
tau = 0.6
noise_dbm = -90.0

[macro]
density = 1e-3
power_dbm = 46.0
alpha = 3.0
antennas = 128
users = 20

[[small_tier]]
density_ratio = 20.0
power_dbm = 30.0
alpha = 3.5
"#;

    #[test]
    fn parses_base_config() {
        let c = ConfigFile::parse(BASE).unwrap();
        let n = &c.network;
        assert!((n.system.beta - beta_from_carrier(1e9)).abs() < 1e-18);
        assert_eq!(n.system.reference_distance, 1.0);
        assert!((n.macro_tier.power - dbm_to_watts(46.0)).abs() < 1e-12);
        assert!((n.small_tiers[0].density - 0.02).abs() < 1e-15);
        assert!(c.sweep.is_none());
    }

    #[test]
    fn missing_macro_density_reports_line() {
        let text = BASE.replace("density = 1e-3\n", "");
        let err = ConfigFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("density"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn invalid_value_reports_its_line() {
        let text = BASE.replace("alpha = 3.0", "alpha = 1.5");
        let err = ConfigFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("line 11"), "{err}");
    }

    #[test]
    fn unknown_key_rejected() {
        let text = BASE.replace("users = 20", "users = 20\nuser = 3");
        assert!(ConfigFile::parse(&text).is_err());
    }

    #[test]
    fn conflicting_alternatives_rejected() {
        let text = BASE.replace("power_dbm = 46.0", "power_dbm = 46.0\npower_w = 40.0");
        let err = ConfigFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("not both"), "{err}");
    }

    #[test]
    fn sweep_section() {
        let text = format!(
            "{BASE}\n[sweep]\nvariable = \"tier_power\"\nvalues = [24.0, 30.0]\nschemes = [\"DRSP\"]\noutputs = [\"energy\", \"assoc\"]\nseeds = [3, 4]\n"
        );
        let c = ConfigFile::parse(&text).unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.variable, SweepVariable::TierPower);
        assert_eq!(s.schemes, vec![Scheme::Drsp]);
        assert_eq!(s.outputs, vec![Output::Energy, Output::Assoc]);
        assert_eq!(s.seeds, vec![3, 4]);
        let cfg = s.apply(&c.network, 24.0).unwrap();
        assert!((cfg.small_tiers[0].power - dbm_to_watts(24.0)).abs() < 1e-15);
    }

    #[test]
    fn sweep_values_must_be_monotone() {
        let text = format!("{BASE}\n[sweep]\nvariable = \"n_antennas\"\nvalues = [64, 32, 128]\n");
        let err = ConfigFile::parse(&text).unwrap_err().to_string();
        assert!(err.contains("monotone"), "{err}");
    }

    #[test]
    fn sweep_values_must_give_valid_networks() {
        let text = format!("{BASE}\n[sweep]\nvariable = \"n_antennas\"\nvalues = [10, 64]\n");
        assert!(ConfigFile::parse(&text).is_err());
    }
}
