use hetnet_wpt::energy::{avg_energy_macro_asymptotic, hetnet_avg_energy};
use hetnet_wpt::model::watts_to_dbm;
use hetnet_wpt::montecarlo::{measure_association, measure_energy, measure_uplink_rate};
use hetnet_wpt::uplink::hetnet_avg_rate;
use hetnet_wpt::{
    assoc_prob, assoc_prob_macro_asymptotic, EnergyBreakdown, McEstimate, McOptions, NetworkConfig, Output, Scheme,
    Tier,
};

use crate::table::ResultRow;

/// Monte Carlo settings; `options.seed` is replaced by each entry of `seeds`.
#[derive(Debug, Clone)]
pub struct McPlan {
    pub options: McOptions,
    pub seeds: Vec<u64>,
}

impl McPlan {
    /// Runs `measure` once per seed.
    fn runs<T, E: std::fmt::Display>(&self, measure: impl Fn(&McOptions) -> Result<T, E>) -> Result<Vec<T>, String> {
        self.seeds
            .iter()
            .map(|&seed| {
                let opts = McOptions {
                    seed,
                    ..self.options.clone()
                };
                measure(&opts).map_err(|e| e.to_string())
            })
            .collect()
    }
}

/// Agreement thresholds used by `validate`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub assoc: f64,
    pub energy: f64,
    pub rate: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            assoc: 0.01,
            energy: 0.03,
            rate: 0.10,
        }
    }
}

impl Tolerances {
    pub fn uniform(t: f64) -> Self {
        Tolerances {
            assoc: t,
            energy: t,
            rate: t,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Plan {
    pub outputs: Vec<Output>,
    pub mc: Option<McPlan>,
    pub check: Option<Tolerances>,
}

fn row(scheme: Scheme, quantity: String, units: &'static str) -> ResultRow {
    ResultRow {
        scheme: scheme.to_string(),
        quantity,
        units,
        ..ResultRow::default()
    }
}

fn set_mc(r: &mut ResultRow, e: McEstimate) {
    r.mc_mean = Some(e.mean);
    r.mc_stderr = Some(e.stderr);
}

/// All rows of one (network, scheme) point, in output order.
pub fn evaluate(cfg: &NetworkConfig, scheme: Scheme, plan: &Plan) -> Vec<ResultRow> {
    let mut rows = Vec::new();
    for output in &plan.outputs {
        let mut part = match output {
            Output::Assoc => assoc_rows(cfg, scheme, plan.mc.as_ref()),
            Output::Energy => energy_rows(cfg, scheme, plan.mc.as_ref()),
            Output::Rate => rate_rows(cfg, scheme, plan.mc.as_ref()),
        };
        if let Some(tol) = plan.check {
            for r in &mut part {
                check(r, &tol);
            }
        }
        rows.extend(part);
    }
    rows
}

/// Standard errors a difference must also exceed to count as a disagreement.
pub const SIGNIFICANCE: f64 = 3.0;

/// Marks a row `pass` or `FAIL` when both values are present. A row fails
/// when the difference exceeds the tolerance and is also statistically
/// significant; the macro rate bound fails when it is significantly above the
/// simulated mean.
fn check(r: &mut ResultRow, tol: &Tolerances) {
    if r.note.contains("analytic failed") || r.note.contains("simulation failed") {
        r.push_note("FAIL (nothing to compare)");
        return;
    }
    let (Some(a), Some(m)) = (r.analytic, r.mc_mean) else {
        return;
    };
    let noise = SIGNIFICANCE * r.mc_stderr.unwrap_or(0.0);
    let q = r.quantity.as_str();
    let (allowed, rule) = if q.starts_with("prob_") {
        (tol.assoc, format!("absolute tolerance {}", tol.assoc))
    } else if q.starts_with("energy_") {
        (tol.energy * a.abs(), format!("relative tolerance {}", tol.energy))
    } else if q == "rate_macro_lb" {
        (0.0, "lower bound".to_string())
    } else if q.starts_with("rate_tier") {
        (tol.rate * a.abs(), format!("relative tolerance {}", tol.rate))
    } else {
        return;
    };
    let gap = if q == "rate_macro_lb" { a - m } else { (a - m).abs() };
    let ok = gap <= allowed.max(noise);
    r.push_note(if ok { format!("pass ({rule})") } else { format!("FAIL ({rule})") });
}

fn assoc_rows(cfg: &NetworkConfig, scheme: Scheme, mc: Option<&McPlan>) -> Vec<ResultRow> {
    let mut rows: Vec<ResultRow> = cfg.tiers().map(|t| row(scheme, format!("prob_{t}"), "1")).collect();
    match assoc_prob(scheme, cfg) {
        Ok(a) => {
            for (r, t) in rows.iter_mut().zip(cfg.tiers()) {
                r.analytic = Some(a.prob(t));
            }
        }
        Err(e) => rows.iter_mut().for_each(|r| r.push_note(format!("analytic failed: {e}"))),
    }
    let asym = assoc_prob_macro_asymptotic(scheme, cfg);
    rows[0].asymptotic = Some(asym.value);
    if !asym.in_regime {
        rows[0].push_note("asymptotic outside its large-N regime");
    }
    if let Some(plan) = mc {
        match plan.runs(|o| measure_association(scheme, cfg, o)) {
            Ok(runs) => {
                for (r, t) in rows.iter_mut().zip(cfg.tiers()) {
                    let est: Vec<McEstimate> = runs.iter().map(|m| m.frequency(t)).collect();
                    set_mc(r, McEstimate::pool(&est));
                }
            }
            Err(e) => rows.iter_mut().for_each(|r| r.push_note(format!("simulation failed: {e}"))),
        }
    }
    rows
}

fn energy_rows(cfg: &NetworkConfig, scheme: Scheme, mc: Option<&McPlan>) -> Vec<ResultRow> {
    let names = EnergyBreakdown::COMPONENTS.iter().copied().chain(["total"]);
    let mut rows = Vec::new();
    for t in cfg.tiers() {
        rows.extend(names.clone().map(|c| row(scheme, format!("energy_{t}_{c}"), "J")));
    }
    rows.push(row(scheme, "energy_hetnet".into(), "J"));
    let per_tier = EnergyBreakdown::COMPONENTS.len() + 1;
    let values = |b: &EnergyBreakdown| {
        let mut v = b.components().to_vec();
        v.push(b.total);
        v
    };

    match hetnet_avg_energy(scheme, cfg) {
        Ok(e) => {
            for (j, t) in cfg.tiers().enumerate() {
                for (r, v) in rows[j * per_tier..].iter_mut().zip(values(e.tier(t))) {
                    r.analytic = Some(v);
                }
            }
            rows.last_mut().unwrap().analytic = Some(e.total);
        }
        Err(e) => rows.iter_mut().for_each(|r| r.push_note(format!("analytic failed: {e}"))),
    }
    match avg_energy_macro_asymptotic(scheme, cfg) {
        Ok(a) => {
            for (r, v) in rows.iter_mut().zip(values(&a.energy)) {
                r.asymptotic = Some(v);
                if !a.prob.in_regime {
                    r.push_note("asymptotic outside its large-N regime");
                }
            }
        }
        Err(e) => rows[..per_tier]
            .iter_mut()
            .for_each(|r| r.push_note(format!("asymptotic failed: {e}"))),
    }
    if let Some(plan) = mc {
        match plan.runs(|o| measure_energy(scheme, cfg, o)) {
            Ok(runs) => {
                for (j, t) in cfg.tiers().enumerate() {
                    for c in 0..per_tier {
                        let est: Vec<McEstimate> = runs
                            .iter()
                            .map(|m| {
                                let tier = m.tier(t);
                                if c < per_tier - 1 {
                                    tier.components[c]
                                } else {
                                    tier.total
                                }
                            })
                            .collect();
                        set_mc(&mut rows[j * per_tier + c], McEstimate::pool(&est));
                    }
                }
                let est: Vec<McEstimate> = runs.iter().map(|m| m.hetnet).collect();
                set_mc(rows.last_mut().unwrap(), McEstimate::pool(&est));
            }
            Err(e) => rows.iter_mut().for_each(|r| r.push_note(format!("simulation failed: {e}"))),
        }
    }
    rows
}

fn rate_rows(cfg: &NetworkConfig, scheme: Scheme, mc: Option<&McPlan>) -> Vec<ResultRow> {
    let mut power_rows: Vec<ResultRow> = cfg.tiers().map(|t| row(scheme, format!("power_{t}"), "W")).collect();
    let mut rate_rows = vec![row(scheme, "rate_macro_lb".into(), "bit/s/Hz")];
    rate_rows.extend(cfg.small_tiers.iter().enumerate().map(|(k, _)| {
        row(scheme, format!("rate_{}", Tier::Small(k)), "bit/s/Hz")
    }));
    rate_rows.push(row(scheme, "rate_hetnet".into(), "bit/s/Hz"));

    let analytic = hetnet_avg_rate(scheme, cfg);
    match &analytic {
        Ok(r) => {
            for (row, t) in power_rows.iter_mut().zip(cfg.tiers()) {
                let p = r.powers.get(t);
                row.analytic = Some(p);
                row.push_note(format!("{} dBm", watts_to_dbm(p)));
            }
            for (row, t) in rate_rows.iter_mut().zip(cfg.tiers()) {
                row.analytic = Some(r.rate(t));
            }
            rate_rows.last_mut().unwrap().analytic = Some(r.total);
            rate_rows.last_mut().unwrap().push_note("macro term is the lower bound");
        }
        Err(e) => {
            for r in power_rows.iter_mut().chain(rate_rows.iter_mut()) {
                r.push_note(format!("analytic failed: {e}"));
            }
        }
    }
    if let (Some(plan), Ok(a)) = (mc, &analytic) {
        match plan.runs(|o| measure_uplink_rate(cfg, &a.powers, o)) {
            Ok(runs) => {
                for (r, t) in rate_rows.iter_mut().zip(cfg.tiers()) {
                    let est: Vec<McEstimate> = runs.iter().map(|m| m.tier(t)).collect();
                    set_mc(r, McEstimate::pool(&est));
                }
                let est: Vec<McEstimate> = runs.iter().map(|m| m.hetnet).collect();
                set_mc(rate_rows.last_mut().unwrap(), McEstimate::pool(&est));
            }
            Err(e) => rate_rows
                .iter_mut()
                .for_each(|r| r.push_note(format!("simulation failed: {e}"))),
        }
    }
    power_rows.extend(rate_rows);
    power_rows
}
