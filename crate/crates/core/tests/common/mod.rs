#![allow(dead_code)]

use hetnet_wpt::model::{beta_from_carrier, dbm_to_watts};
use hetnet_wpt::{MacroTier, NetworkConfig, SmallTier, SystemParams};

pub fn system(tau: f64) -> SystemParams {
    SystemParams {
        beta: beta_from_carrier(1e9),
        reference_distance: 1.0,
        eta: 0.9,
        tau,
        block_time: 1.0,
        noise_power: dbm_to_watts(-90.0),
    }
}

/// Macro tier plus one small tier; densities relative to λ_M = 1e-3 m^-2.
pub fn two_tier(n: u32, s: u32, alpha_m: f64, alpha_2: f64, ratio: f64, p2_dbm: f64, tau: f64) -> NetworkConfig {
    NetworkConfig::new(
        system(tau),
        MacroTier {
            density: 1e-3,
            power: dbm_to_watts(46.0),
            alpha: alpha_m,
            antennas: n,
            users: s,
        },
        vec![SmallTier {
            density: ratio * 1e-3,
            power: dbm_to_watts(p2_dbm),
            alpha: alpha_2,
        }],
    )
    .unwrap()
}

/// Association figure setup.
pub fn assoc_cfg(n: u32) -> NetworkConfig {
    two_tier(n, 10, 3.5, 4.0, 5.0, 30.0, 0.6)
}

/// Energy figure setup.
pub fn energy_cfg(n: u32, s: u32, p2_dbm: f64) -> NetworkConfig {
    two_tier(n, s, 3.0, 3.5, 20.0, p2_dbm, 0.6)
}

/// Uplink figure setup.
pub fn rate_cfg(n: u32, s: u32) -> NetworkConfig {
    two_tier(n, s, 2.8, 2.5, 5.0, 30.0, 0.3)
}
