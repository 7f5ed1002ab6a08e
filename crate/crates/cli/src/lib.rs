//! Command-line front end: loads a TOML network description, evaluates the
//! analytic model (optionally against Monte Carlo) and writes CSV.
//!
//! Exit codes: 0 on success, 1 on configuration or usage errors, 2 when
//! `validate` finds a disagreement beyond tolerance.

pub mod args;
pub mod eval;
pub mod table;

use std::ffi::OsString;
use std::path::Path;

use anyhow::{bail, Context, Result};
use clap::Parser;
use hetnet_wpt::model::watts_to_dbm;
use hetnet_wpt::montecarlo::{interferer_radius, Windows, WINDOW_EXPECTED_COUNT};
use hetnet_wpt::{ConfigFile, McOptions, NetworkConfig, Output, Scheme};
use rayon::prelude::*;
use sha2::{Digest, Sha256};

pub use args::{Cli, Command, RunArgs};
pub use eval::{evaluate, McPlan, Plan, Tolerances};
pub use table::{render, ResultRow, COLUMNS};

/// Default geometry draws when simulation is requested without a count.
pub const DEFAULT_MC_DROPS: u64 = 100_000;

/// Outcome of a successful run.
#[derive(Debug, Clone)]
pub struct Report {
    pub csv: String,
    /// Rows compared against a tolerance.
    pub checked: usize,
    pub failures: usize,
}

/// One evaluation point of a run.
struct Point {
    variable: String,
    value: Option<f64>,
    value_si: Option<f64>,
    cfg: NetworkConfig,
    scheme: Scheme,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn describe_windows(cfg: &NetworkConfig, radius: Option<f64>) -> Result<String> {
    let w = Windows::resolve(cfg, radius)?;
    let radii: Vec<String> = cfg.tiers().map(|t| format!("{t}={} m", w.radius(t))).collect();
    Ok(match radius {
        Some(r) => format!("uniform {r} m"),
        None => format!("auto ({WINDOW_EXPECTED_COUNT} expected stations per tier): {}", radii.join(", ")),
    })
}

/// Evaluates a parsed command line.
pub fn run(cli: &Cli) -> Result<Report> {
    let command = &cli.command;
    let args = command.args();
    let text = std::fs::read(&args.config).with_context(|| format!("cannot read {}", args.config.display()))?;
    let text = String::from_utf8(text).context("configuration is not UTF-8")?;
    let file = ConfigFile::parse(&text).with_context(|| format!("invalid configuration {}", args.config.display()))?;
    let base = &file.network;

    let sweep = match command {
        Command::Sweep(_) => match &file.sweep {
            Some(s) => Some(s),
            None => bail!("{} has no [sweep] section", args.config.display()),
        },
        _ => None,
    };
    let schemes = match (args.scheme, sweep) {
        (Some(s), _) => s.schemes(),
        (None, Some(s)) => s.schemes.clone(),
        (None, None) => Scheme::ALL.to_vec(),
    };
    let outputs = match (&args.outputs, sweep, command) {
        (Some(o), _, _) => o.clone(),
        (None, Some(s), _) => s.outputs.clone(),
        (None, None, Command::Assoc(_)) => vec![Output::Assoc],
        (None, None, Command::Energy(_)) => vec![Output::Energy],
        (None, None, Command::Rate(_)) => vec![Output::Rate],
        (None, None, _) => Output::ALL.to_vec(),
    };
    if outputs.is_empty() {
        bail!("--outputs must name at least one of assoc, energy, rate");
    }
    let seeds = match (&args.seed, sweep) {
        (Some(s), _) => s.clone(),
        (None, Some(s)) => s.seeds.clone(),
        (None, None) => vec![1],
    };
    if seeds.is_empty() {
        bail!("at least one seed is required");
    }
    let wants_mc = matches!(command, Command::Validate(_)) || sweep.is_some_and(|s| s.mc_validation);
    let drops = args.mc_drops.unwrap_or(if wants_mc { DEFAULT_MC_DROPS } else { 0 });
    if matches!(command, Command::Validate(_)) && drops == 0 {
        bail!("validate needs --mc-drops of at least 1");
    }
    let options = McOptions {
        n_geometry: drops.max(1),
        n_fading: args.mc_fading,
        seed: seeds[0],
        window_radius: args.window_radius,
        interferer_mode: args.interferer_mode.into(),
        ..McOptions::default()
    };
    options.validate()?;
    if let Some(r) = args.window_radius {
        Windows::uniform(base, r)?;
    }
    if let Some(t) = args.tolerance {
        if !(t >= 0.0 && t.is_finite()) {
            bail!("--tolerance must be a nonnegative number");
        }
    }
    let check = matches!(command, Command::Validate(_))
        .then(|| args.tolerance.map_or_else(Tolerances::default, Tolerances::uniform));
    let plan = Plan {
        outputs: outputs.clone(),
        mc: (drops > 0).then(|| McPlan {
            options: options.clone(),
            seeds: seeds.clone(),
        }),
        check,
    };

    let mut points = Vec::new();
    match sweep {
        Some(s) => {
            for &v in &s.values {
                let cfg = s.apply(base, v)?;
                for &scheme in &schemes {
                    points.push(Point {
                        variable: s.variable.to_string(),
                        value: Some(v),
                        value_si: Some(s.si_value(v)),
                        cfg: cfg.clone(),
                        scheme,
                    });
                }
            }
        }
        None => {
            for &scheme in &schemes {
                points.push(Point {
                    variable: "none".into(),
                    value: None,
                    value_si: None,
                    cfg: base.clone(),
                    scheme,
                });
            }
        }
    }

    let rows: Vec<ResultRow> = points
        .par_iter()
        .map(|p| {
            let mut rows = evaluate(&p.cfg, p.scheme, &plan);
            for r in &mut rows {
                r.sweep_variable = p.variable.clone();
                r.sweep_value = p.value;
                r.sweep_value_si = p.value_si;
            }
            rows
        })
        .collect::<Vec<_>>()
        .concat();

    let checked = rows.iter().filter(|r| r.note.contains("pass (") || r.note.contains("FAIL (")).count();
    let failures = rows.iter().filter(|r| r.note.contains("FAIL (")).count();

    let mut meta = vec![
        format!("hetnet-wpt {}", env!("CARGO_PKG_VERSION")),
        format!("command: {}", command.name()),
        format!("config: {} sha256={}", args.config.display(), hex(&Sha256::digest(text.as_bytes()))),
        format!("schemes: {}", join(&schemes)),
        format!("outputs: {}", join(&outputs)),
    ];
    if let Some(s) = sweep {
        meta.push(format!("sweep: {} over {}", s.variable, join(&s.values)));
    }
    let powers: Vec<String> = base
        .tiers()
        .map(|t| {
            let p = base.power(t);
            format!("{t}={} dBm ({p} W)", watts_to_dbm(p))
        })
        .collect();
    meta.push(format!("transmit powers: {}", powers.join(", ")));
    let mut rerun = format!(
        "hetnet-wpt {} {} --scheme {} --outputs {} --seed {} --mc-drops {drops} --mc-fading {} --interferer-mode {}",
        command.name(),
        args.config.display(),
        match schemes.as_slice() {
            [Scheme::Drsp] => "drsp",
            [Scheme::Ursp] => "ursp",
            _ => "both",
        },
        join(&outputs),
        join(&seeds),
        args.mc_fading,
        args.interferer_mode.name(),
    );
    if drops > 0 {
        meta.push(format!("seeds: {}", join(&seeds)));
        meta.push(format!(
            "monte carlo: {drops} geometry draws x {} fading draws per seed, interferers {}",
            args.mc_fading,
            args.interferer_mode.name()
        ));
        meta.push(format!("windows: {}", describe_windows(base, args.window_radius)?));
        if outputs.contains(&Output::Rate) {
            let r = args.window_radius.unwrap_or_else(|| interferer_radius(base));
            meta.push(format!("uplink interferer window: {r} m"));
        }
    } else {
        meta.push("monte carlo: disabled".into());
    }
    if let Some(r) = args.window_radius {
        rerun.push_str(&format!(" --window-radius {r}"));
    }
    if let Some(t) = plan.check {
        meta.push(format!(
            "tolerance: assoc {} absolute, energy {} relative, rate {} relative, macro rate bound must not exceed simulation",
            t.assoc, t.energy, t.rate
        ));
        if let Some(t) = args.tolerance {
            rerun.push_str(&format!(" --tolerance {t}"));
        }
    }
    meta.push(format!("rerun: {rerun}"));

    Ok(Report {
        csv: render(&meta, &rows),
        checked,
        failures,
    })
}

fn write_output(path: Option<&Path>, csv: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, csv).with_context(|| format!("cannot write {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(csv.as_bytes()).context("cannot write to standard output")
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = run(&cli).and_then(|report| {
        write_output(cli.command.args().out.as_deref(), &report.csv)?;
        Ok(report)
    });
    match outcome {
        Ok(r) if r.failures > 0 => {
            eprintln!("validation failed: {} of {} compared values out of tolerance", r.failures, r.checked);
            2
        }
        Ok(_) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
