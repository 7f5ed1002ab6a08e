//! Shared fixtures for the criterion benchmarks.

use hetnet_wpt::model::{beta_from_carrier, dbm_to_watts};
use hetnet_wpt::{MacroTier, NetworkConfig, SmallTier, SystemParams};

/// Two-tier network with a 1 GHz carrier, 46 dBm macro stations at
/// 1e-3 m^-2 and a small tier `ratio` times as dense.
pub fn two_tier(n: u32, s: u32, alpha_m: f64, alpha_2: f64, ratio: f64, p2_dbm: f64, tau: f64) -> NetworkConfig {
    NetworkConfig::new(
        SystemParams {
            beta: beta_from_carrier(1e9),
            reference_distance: 1.0,
            eta: 0.9,
            tau,
            block_time: 1.0,
            noise_power: dbm_to_watts(-90.0),
        },
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
    .expect("valid benchmark network")
}

pub fn energy_network() -> NetworkConfig {
    two_tier(128, 20, 3.0, 3.5, 20.0, 30.0, 0.6)
}

pub fn rate_network() -> NetworkConfig {
    two_tier(128, 10, 2.8, 2.5, 5.0, 30.0, 0.3)
}
