mod common;

use common::{assoc_cfg, energy_cfg, rate_cfg};
use hetnet_wpt::model::Tier;
use hetnet_wpt::montecarlo::{
    far_field_mean, measure_association, measure_energy, measure_uplink_rate, sample_ppp_annulus, sample_ppp_disc,
    sample_realization, Windows,
};
use hetnet_wpt::specialfn::{gamma, upper_incomplete_gamma};
use hetnet_wpt::uplink::stable_powers;
use hetnet_wpt::{McOptions, Scheme};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn poisson_pmf(mean: f64, k: u64) -> f64 {
    (-mean + k as f64 * mean.ln() - hetnet_wpt::specialfn::ln_gamma(k as f64 + 1.0)).exp()
}

#[test]
fn station_counts_are_poisson() {
    let cfg = assoc_cfg(64);
    let windows = Windows::uniform(&cfg, 100.0).unwrap();
    let mean = cfg.macro_tier.density * std::f64::consts::PI * 100.0 * 100.0;
    let seeds = 10_000u64;
    let (lo, hi) = (20u64, 44u64);
    let mut observed = vec![0.0; (hi - lo + 3) as usize];
    let mut total = 0usize;
    for seed in 0..seeds {
        let n = sample_realization(&cfg, &windows, seed).macro_points.len() as u64;
        total += n as usize;
        let bin = if n < lo { 0 } else if n > hi { observed.len() - 1 } else { (n - lo + 1) as usize };
        observed[bin] += 1.0;
    }
    let mut expected = vec![0.0; observed.len()];
    for k in lo..=hi {
        expected[(k - lo + 1) as usize] = poisson_pmf(mean, k);
    }
    expected[0] = (0..lo).map(|k| poisson_pmf(mean, k)).sum();
    let last = expected.len() - 1;
    expected[last] = 1.0 - expected[..last].iter().sum::<f64>();
    let chi2: f64 = observed
        .iter()
        .zip(&expected)
        .map(|(o, e)| {
            let e = e * seeds as f64;
            (o - e) * (o - e) / e
        })
        .sum();
    let df = (observed.len() - 1) as f64;
    let p_value = upper_incomplete_gamma(df / 2.0, chi2 / 2.0).unwrap() / gamma(df / 2.0);
    assert!(p_value > 0.01, "chi2 = {chi2}, p = {p_value}");
    let sample_mean = total as f64 / seeds as f64;
    let band = 3.0 * (mean / seeds as f64).sqrt();
    assert!((sample_mean - mean).abs() < band, "{sample_mean} vs {mean}");
}

#[test]
fn estimates_are_bit_identical_across_runs_and_thread_counts() {
    let cfg = energy_cfg(64, 5, 24.0);
    let opts = McOptions {
        n_geometry: 5_000,
        n_fading: 3,
        seed: 42,
        ..McOptions::default()
    };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let a = measure_association(Scheme::Drsp, &cfg, &opts).unwrap();
            let e = measure_energy(Scheme::Ursp, &cfg, &opts).unwrap();
            (a, e)
        })
    };
    let (a1, e1) = run(1);
    let (a3, e3) = run(3);
    assert_eq!(a1, a3);
    assert_eq!(e1, e3);
    assert_eq!(e1.hetnet.mean.to_bits(), e3.hetnet.mean.to_bits());

    let rcfg = rate_cfg(64, 10);
    let powers = stable_powers(Scheme::Drsp, &rcfg).unwrap();
    let r1 = measure_uplink_rate(&rcfg, &powers, &opts).unwrap();
    let r2 = measure_uplink_rate(&rcfg, &powers, &opts).unwrap();
    assert_eq!(r1, r2);

    let other = McOptions { seed: 43, ..opts };
    assert_ne!(measure_energy(Scheme::Ursp, &cfg, &other).unwrap(), e1);
}

/// Ambient power received at the origin from the given stations of one tier.
fn ambient(points: &[hetnet_wpt::montecarlo::Point2], power: f64, alpha: f64, beta: f64) -> f64 {
    power * beta * points.iter().map(|p| p.norm().max(1.0).powf(-alpha)).sum::<f64>()
}

#[test]
fn doubling_the_window_leaves_ambient_energy_unchanged() {
    let cfg = energy_cfg(128, 20, 30.0);
    let windows = Windows::auto(&cfg);
    let beta = cfg.system.beta;
    let draws = 20_000;
    for tier in cfg.tiers() {
        let (power, density, alpha) = (cfg.power(tier), cfg.density(tier), cfg.alpha(tier));
        let r = windows.radius(tier);
        let (mut base, mut doubled) = (0.0, 0.0);
        for i in 0..draws {
            let mut rng = ChaCha8Rng::seed_from_u64(i);
            let inner = sample_ppp_disc(&mut rng, density, r);
            let ring = sample_ppp_annulus(&mut rng, density, r, 2.0 * r);
            let a = ambient(&inner, power, alpha, beta);
            base += a + far_field_mean(power, density, alpha, r, beta);
            doubled += a + ambient(&ring, power, alpha, beta) + far_field_mean(power, density, alpha, 2.0 * r, beta);
        }
        let change = (doubled - base).abs() / base;
        assert!(change < 0.005, "{tier}: relative change {change}");
    }
}

#[test]
fn default_windows_hold_the_nearest_station() {
    let cfg = assoc_cfg(100);
    let w = Windows::auto(&cfg);
    for tier in cfg.tiers() {
        let count = cfg.density(tier) * std::f64::consts::PI * w.radius(tier).powi(2);
        assert!(count >= 40.0 - 1e-9, "{tier}: {count}");
    }
    assert!(w.radius(Tier::Macro) > w.radius(Tier::Small(0)));
}
