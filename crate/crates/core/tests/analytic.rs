mod common;

use common::{assoc_cfg, energy_cfg, rate_cfg};
use hetnet_wpt::association::assoc_prob_macro_asymptotic;
use hetnet_wpt::energy::{avg_energy_macro, avg_energy_macro_asymptotic, hetnet_avg_energy};
use hetnet_wpt::uplink::{hetnet_avg_rate, hetnet_avg_rate_at, UplinkPowers};
use hetnet_wpt::{assoc_prob, QuadratureSpec, Scheme};

#[test]
fn asymptotic_association_gap_shrinks_with_antennas() {
    for scheme in Scheme::ALL {
        let mut last = f64::INFINITY;
        for n in [50, 100, 200, 400] {
            let cfg = assoc_cfg(n);
            let exact = assoc_prob(scheme, &cfg).unwrap().prob_macro;
            let asym = assoc_prob_macro_asymptotic(scheme, &cfg);
            let gap = (asym.value - exact).abs() / exact;
            assert!(gap <= last + 1e-12, "{scheme} N={n}: gap {gap} after {last}");
            last = gap;
        }
        assert!(last < 0.05, "{scheme}: gap at N=400 is {last}");
    }
}

#[test]
fn drsp_serves_more_macro_users_in_the_association_setup() {
    for n in [50, 100, 200] {
        let cfg = assoc_cfg(n);
        let d = assoc_prob(Scheme::Drsp, &cfg).unwrap().prob_macro;
        let u = assoc_prob(Scheme::Ursp, &cfg).unwrap().prob_macro;
        assert!(d >= u, "N={n}: {d} < {u}");
    }
}

#[test]
fn macro_energy_orderings() {
    for scheme in Scheme::ALL {
        let in_n: Vec<f64> = [32, 64, 128, 256]
            .iter()
            .map(|&n| avg_energy_macro(scheme, &energy_cfg(n, 20, 30.0)).unwrap().total)
            .collect();
        assert!(in_n.windows(2).all(|w| w[1] > w[0]), "{scheme}: {in_n:?}");
        let in_s: Vec<f64> = [5, 10, 15, 20]
            .iter()
            .map(|&s| avg_energy_macro(scheme, &energy_cfg(128, s, 30.0)).unwrap().total)
            .collect();
        assert!(in_s.windows(2).all(|w| w[1] < w[0]), "{scheme}: {in_s:?}");
    }
    for (s, p2) in [(5, 24.0), (20, 30.0)] {
        let cfg = energy_cfg(128, s, p2);
        let d = hetnet_avg_energy(Scheme::Drsp, &cfg).unwrap().total;
        let u = hetnet_avg_energy(Scheme::Ursp, &cfg).unwrap().total;
        assert!(d >= u, "S={s}: DRSP {d} < URSP {u}");
    }
}

#[test]
fn directed_transfer_dominates() {
    for n in [64, 128, 256] {
        let e = avg_energy_macro(Scheme::Drsp, &energy_cfg(n, 20, 30.0)).unwrap();
        assert!(e.directed >= e.isotropic);
        assert!(e.directed >= e.ambient_macro + e.ambient_small);
    }
}

#[test]
fn asymptotic_energy_tracks_exact_for_many_antennas() {
    let cfg = energy_cfg(1024, 5, 30.0);
    for scheme in Scheme::ALL {
        let exact = avg_energy_macro(scheme, &cfg).unwrap();
        let asym = avg_energy_macro_asymptotic(scheme, &cfg).unwrap();
        let rel = (asym.energy.directed - exact.directed).abs() / exact.directed;
        assert!(rel < 0.05, "{scheme}: {} vs {}", asym.energy.directed, exact.directed);
    }
}

#[test]
fn hetnet_rate_decreases_with_users_per_cell() {
    for scheme in Scheme::ALL {
        let rates: Vec<f64> = [5, 10, 15, 20]
            .iter()
            .map(|&s| hetnet_avg_rate(scheme, &rate_cfg(128, s)).unwrap().total)
            .collect();
        assert!(rates.windows(2).all(|w| w[1] < w[0]), "{scheme}: {rates:?}");
    }
}

#[test]
fn rates_scale_with_uplink_fraction_at_fixed_powers() {
    let cfg = rate_cfg(128, 10);
    let powers = UplinkPowers {
        scheme: Scheme::Drsp,
        p_macro: 1e-4,
        p_tier: vec![2e-4],
    };
    let spec = QuadratureSpec::default();
    let a = hetnet_avg_rate_at(&cfg, powers.clone(), &spec).unwrap();
    let mut other = cfg.clone();
    other.system.tau = 0.7;
    let b = hetnet_avg_rate_at(&other, powers, &spec).unwrap();
    let ratio = (1.0 - 0.3) / (1.0 - 0.7);
    assert!((a.total / b.total - ratio).abs() < 1e-8 * ratio);
}
