//! Analytic and Monte Carlo evaluation of wireless power transfer in
//! K-tier heterogeneous cellular networks whose macrocells use massive MIMO.
//!
//! A typical user sits at the origin. Macro base stations (N antennas, S
//! co-scheduled users) and single-antenna small cells are independent
//! homogeneous Poisson point processes. Users associate either by maximum
//! downlink received power ([`Scheme::Drsp`]) or maximum compensated uplink
//! path gain ([`Scheme::Ursp`]), harvest energy during a fraction `tau` of each
//! block and spend it on uplink transmission during the remainder.
//!
//! Module map:
//!
//! * [`specialfn`]: incomplete gamma, Gauss hypergeometric, adaptive quadrature.
//! * [`model`]: configuration types, path loss and association bias radii.
//! * [`config`]: the TOML configuration file schema.
//! * [`association`]: association probabilities and serving-distance densities.
//! * [`energy`]: conditional, average and asymptotic harvested energy.
//! * [`uplink`]: stable transmit powers and uplink rates.
//! * [`montecarlo`]: seedable simulation used as the oracle for all of the above.

// NaN-rejecting checks are written as negated comparisons on purpose.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod association;
pub mod config;
pub mod energy;
mod error;
pub mod model;
pub mod montecarlo;
pub mod specialfn;
pub mod uplink;

pub use association::{assoc_prob, assoc_prob_macro_asymptotic, AssociationResult, ServingDistance};
pub use config::{ConfigFile, Output, SweepSpec, SweepVariable};
pub use energy::{EnergyBreakdown, HetNetEnergy};
pub use error::{Error, Result};
pub use model::{
    BiasRadii, MacroTier, NetworkConfig, Scheme, SchemeRadii, SmallTier, SystemParams, Tier,
};
pub use montecarlo::{McEstimate, McOptions, NetworkRealization};
pub use specialfn::QuadratureSpec;
pub use uplink::{HetNetRate, UplinkPowers};
