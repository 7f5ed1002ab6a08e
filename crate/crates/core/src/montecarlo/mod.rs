//! Seedable Monte Carlo simulation of the network.
//!
//! Every geometry draw `i` of a run with seed `s` uses its own random streams
//! derived from `(s, i)`: one for station positions, one for fading and one
//! for uplink interferers. Draws are processed in fixed chunks whose partial
//! results are merged in index order, so estimates are bit-identical for a
//! given seed regardless of thread count.
//!
//! Windows are finite. Stations beyond a tier's window contribute their exact
//! mean power (a closed-form tail integral) to ambient energy and uplink
//! interference.

mod assoc;
mod energy;
mod fading;
mod geometry;
mod rng;
mod stats;
mod uplink;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use assoc::{associate, measure_association, sample_serving, AssociationMc, Serving};
pub use energy::{measure_energy, measure_energy_conditional, EnergyMc, TierEnergyMc};
pub use fading::{FadingMode, FadingModel};
pub use geometry::{
    far_field_mean, sample_ppp_annulus, sample_ppp_disc, sample_realization, NetworkRealization, Point2, Windows,
    WINDOW_EXPECTED_COUNT,
};
pub use stats::McEstimate;
pub use uplink::{
    interferer_radius, measure_uplink_rate, measure_uplink_rate_conditional, sample_uplink_sinr, InterfererMode,
    UplinkMc, INTERFERER_EXPECTED_COUNT,
};

/// Run parameters shared by all measurements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    pub n_geometry: u64,
    /// Fading draws per geometry draw.
    pub n_fading: u32,
    pub seed: u64,
    /// One window radius for every tier instead of the automatic ones. For
    /// uplink runs it sets the interferer window.
    pub window_radius: Option<f64>,
    pub fading: FadingMode,
    pub interferer_mode: InterfererMode,
}

impl Default for McOptions {
    fn default() -> Self {
        McOptions {
            n_geometry: 100_000,
            n_fading: 10,
            seed: 1,
            window_radius: None,
            fading: FadingMode::Random,
            interferer_mode: InterfererMode::PppDensity,
        }
    }
}

impl McOptions {
    pub fn validate(&self) -> Result<()> {
        if self.n_geometry < 1 || self.n_fading < 1 {
            return Err(Error::InvalidConfig("Monte Carlo draw counts must be at least 1".into()));
        }
        Ok(())
    }
}
