use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hetnet_wpt::montecarlo::InterfererMode;
use hetnet_wpt::{Output, Scheme};

#[derive(Debug, Parser)]
#[command(name = "hetnet-wpt", version, about = "Wireless power transfer in K-tier heterogeneous networks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Association probabilities.
    Assoc(RunArgs),
    /// Average harvested energy with its component breakdown.
    Energy(RunArgs),
    /// Stable uplink powers and average uplink rates.
    Rate(RunArgs),
    /// Evaluates the [sweep] section of the configuration.
    Sweep(RunArgs),
    /// Compares analytic values with Monte Carlo estimates.
    Validate(RunArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Assoc(_) => "assoc",
            Command::Energy(_) => "energy",
            Command::Rate(_) => "rate",
            Command::Sweep(_) => "sweep",
            Command::Validate(_) => "validate",
        }
    }

    pub fn args(&self) -> &RunArgs {
        match self {
            Command::Assoc(a) | Command::Energy(a) | Command::Rate(a) | Command::Sweep(a) | Command::Validate(a) => a,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SchemeArg {
    Drsp,
    Ursp,
    Both,
}

impl SchemeArg {
    pub fn schemes(self) -> Vec<Scheme> {
        match self {
            SchemeArg::Drsp => vec![Scheme::Drsp],
            SchemeArg::Ursp => vec![Scheme::Ursp],
            SchemeArg::Both => Scheme::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InterfererArg {
    PppDensity,
    ExactPerCell,
}

impl From<InterfererArg> for InterfererMode {
    fn from(a: InterfererArg) -> Self {
        match a {
            InterfererArg::PppDensity => InterfererMode::PppDensity,
            InterfererArg::ExactPerCell => InterfererMode::ExactPerCell,
        }
    }
}

impl InterfererArg {
    pub fn name(self) -> &'static str {
        match self {
            InterfererArg::PppDensity => "ppp-density",
            InterfererArg::ExactPerCell => "exact-per-cell",
        }
    }
}

fn parse_output(s: &str) -> Result<Output, String> {
    s.parse().map_err(|e: hetnet_wpt::Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// TOML configuration file.
    pub config: PathBuf,

    /// Output CSV path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Monte Carlo seeds, comma separated. Estimates are pooled over seeds.
    #[arg(long, value_delimiter = ',')]
    pub seed: Option<Vec<u64>>,

    /// Monte Carlo geometry draws per seed; 0 disables simulation.
    #[arg(long)]
    pub mc_drops: Option<u64>,

    /// Fading draws per geometry draw.
    #[arg(long, default_value_t = 10)]
    pub mc_fading: u32,

    /// Simulation window radius in meters for every tier instead of the
    /// automatic radii.
    #[arg(long)]
    pub window_radius: Option<f64>,

    /// Agreement tolerance for `validate`: absolute for probabilities,
    /// relative otherwise. Defaults to 0.01, 0.03 (energy) and 0.10 (rate).
    /// Differences within three standard errors are never failures.
    #[arg(long)]
    pub tolerance: Option<f64>,

    /// Association schemes to evaluate.
    #[arg(long, value_enum)]
    pub scheme: Option<SchemeArg>,

    /// Quantity families (assoc, energy, rate), comma separated.
    #[arg(long, value_delimiter = ',', value_parser = parse_output)]
    pub outputs: Option<Vec<Output>>,

    /// Placement of interfering uplink users in simulation.
    #[arg(long, value_enum, default_value_t = InterfererArg::PppDensity)]
    pub interferer_mode: InterfererArg,
}
