mod common;

use common::{assoc_cfg, energy_cfg, rate_cfg};
use hetnet_wpt::association::ServingDistance;
use hetnet_wpt::energy::{cond_energy_macro, cond_energy_tier_k, hetnet_avg_energy};
use hetnet_wpt::montecarlo::{
    measure_association, measure_energy, measure_energy_conditional, measure_uplink_rate, sample_serving,
    sample_uplink_sinr,
};
use hetnet_wpt::uplink::{hetnet_avg_rate, rate_lb_macro_conditional, sinr_ccdf_tier_k, stable_powers};
use hetnet_wpt::{assoc_prob, McEstimate, McOptions, QuadratureSpec, Scheme, Tier};

fn opts(n: u64, seed: u64) -> McOptions {
    McOptions {
        n_geometry: n,
        seed,
        ..McOptions::default()
    }
}

fn within(est: &McEstimate, value: f64, sigmas: f64, rel_slack: f64) -> bool {
    (est.mean - value).abs() <= sigmas * est.stderr + rel_slack * value.abs()
}

#[test]
fn association_frequency_matches_analytic() {
    for n in [50, 200] {
        let cfg = assoc_cfg(n);
        for scheme in Scheme::ALL {
            let analytic = assoc_prob(scheme, &cfg).unwrap();
            let mc = measure_association(scheme, &cfg, &opts(40_000, 7)).unwrap();
            for tier in cfg.tiers() {
                let f = mc.frequency(tier);
                assert!(
                    (f.mean - analytic.prob(tier)).abs() < 0.01,
                    "N={n} {scheme} {tier}: mc {} analytic {}",
                    f.mean,
                    analytic.prob(tier)
                );
            }
        }
    }
}

#[test]
fn serving_distance_density_at_ten_meters() {
    let cfg = assoc_cfg(100);
    let n = 100_000;
    for scheme in Scheme::ALL {
        let serving = sample_serving(scheme, &cfg, &opts(n, 3)).unwrap();
        let sd = ServingDistance::new(&cfg, scheme);
        for tier in cfg.tiers() {
            let (lo, hi) = (9.0, 11.0);
            let hits = serving
                .iter()
                .filter(|s| s.tier == tier && (lo..hi).contains(&s.distance))
                .count() as f64;
            let p = hits / n as f64;
            let expected = hetnet_wpt::specialfn::integrate(
                |x| sd.joint_density(tier, x),
                lo,
                hi,
                &QuadratureSpec::default(),
            )
            .unwrap();
            let sigma = (expected * (1.0 - expected) / n as f64).sqrt();
            assert!((p - expected).abs() < 4.0 * sigma, "{scheme} {tier}: {p} vs {expected}");
        }
    }
}

#[test]
fn conditional_energy_matches_analytic() {
    let cfg = energy_cfg(128, 20, 30.0);
    let run = McOptions {
        n_geometry: 20_000,
        ..McOptions::default()
    };
    for scheme in Scheme::ALL {
        let mc = measure_energy_conditional(scheme, &cfg, Tier::Macro, 25.0, &run).unwrap();
        let an = cond_energy_macro(scheme, 25.0, &cfg).components();
        for (j, (est, value)) in mc.components.iter().zip(an).enumerate() {
            assert!(within(est, value, 4.0, 1e-3), "{scheme} macro component {j}: {est:?} vs {value}");
        }
        let mc = measure_energy_conditional(scheme, &cfg, Tier::Small(0), 8.0, &run).unwrap();
        let an = cond_energy_tier_k(scheme, 0, 8.0, &cfg).components();
        for (j, (est, value)) in mc.components.iter().zip(an).enumerate() {
            assert!(within(est, value, 4.0, 1e-3), "{scheme} tier component {j}: {est:?} vs {value}");
        }
    }
}

#[test]
fn average_energy_matches_analytic() {
    let cfg = energy_cfg(128, 20, 30.0);
    for scheme in Scheme::ALL {
        let an = hetnet_avg_energy(scheme, &cfg).unwrap();
        let mc = measure_energy(scheme, &cfg, &opts(100_000, 11)).unwrap();
        let macro_mc = mc.tier(Tier::Macro);
        for (j, (est, value)) in macro_mc.components.iter().zip(an.macro_energy.components()).enumerate() {
            assert!(within(est, value, 4.0, 0.01), "{scheme} component {j}: {est:?} vs {value}");
        }
        let small = mc.tier(Tier::Small(0)).total;
        assert!(within(&small, an.tier_energy[0].total, 4.0, 0.01), "{scheme}: {small:?}");
        assert!(within(&mc.hetnet, an.total, 4.0, 0.01), "{scheme}: {:?} vs {}", mc.hetnet, an.total);
    }
}

#[test]
fn tier_ccdf_matches_sinr_samples() {
    let cfg = rate_cfg(128, 10);
    let y = 3.0;
    for scheme in Scheme::ALL {
        let powers = stable_powers(scheme, &cfg).unwrap();
        let sinr = sample_uplink_sinr(&cfg, &powers, Tier::Small(0), y, &opts(4_000, 5)).unwrap();
        for threshold in [0.1, 1.0, 10.0, 100.0] {
            let empirical = sinr.iter().filter(|&&s| s > threshold).count() as f64 / sinr.len() as f64;
            let analytic = sinr_ccdf_tier_k(scheme, 0, y, threshold, &cfg).unwrap();
            assert!(
                (empirical - analytic).abs() < 0.05,
                "{scheme} t={threshold}: {empirical} vs {analytic}"
            );
        }
    }
}

#[test]
fn uplink_rates_against_analytic() {
    for n in [64, 256] {
        let cfg = rate_cfg(n, 10);
        for scheme in Scheme::ALL {
            let an = hetnet_avg_rate(scheme, &cfg).unwrap();
            let mc = measure_uplink_rate(&cfg, &an.powers, &opts(20_000, 2)).unwrap();
            let macro_mc = mc.tier(Tier::Macro);
            assert!(an.rate_macro <= macro_mc.mean, "N={n} {scheme}: bound {} mc {macro_mc:?}", an.rate_macro);
            let tier_mc = mc.tier(Tier::Small(0));
            let rel = (tier_mc.mean - an.rate_tier[0]).abs() / an.rate_tier[0];
            assert!(rel < 0.1, "N={n} {scheme}: tier rate {} vs mc {tier_mc:?}", an.rate_tier[0]);
        }
    }
}

#[test]
fn macro_bound_holds_conditionally() {
    let cfg = rate_cfg(128, 10);
    for scheme in Scheme::ALL {
        let powers = stable_powers(scheme, &cfg).unwrap();
        for x in [5.0, 20.0, 60.0] {
            let bound = rate_lb_macro_conditional(scheme, x, &cfg).unwrap();
            let mc = hetnet_wpt::montecarlo::measure_uplink_rate_conditional(
                &cfg,
                &powers,
                Tier::Macro,
                x,
                &opts(2_000, 9),
            )
            .unwrap();
            assert!(bound <= mc.mean, "{scheme} x={x}: {bound} vs {mc:?}");
        }
    }
}
