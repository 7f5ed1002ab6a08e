//! Adaptive Gauss–Kronrod (10/21 point) quadrature on finite intervals and a
//! block-doubling scheme with tail truncation for `[lo, ∞)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances for [`integrate`] and friends.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
    /// A semi-infinite integral stops once the last block and the estimated
    /// remainder are both below this fraction of the accumulated value.
    pub tail_cutoff_fraction: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 0.0,
            max_subdivisions: 2_000,
            tail_cutoff_fraction: 1e-13,
        }
    }
}

impl QuadratureSpec {
    pub fn new(rel_tol: f64, abs_tol: f64, max_subdivisions: usize, tail_cutoff_fraction: f64) -> Result<Self> {
        let spec = QuadratureSpec {
            rel_tol,
            abs_tol,
            max_subdivisions,
            tail_cutoff_fraction,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("rel_tol = {} must be positive", self.rel_tol)));
        }
        if !(self.abs_tol >= 0.0) {
            return Err(Error::InvalidConfig(format!("abs_tol = {} must be nonnegative", self.abs_tol)));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidConfig("max_subdivisions must be at least 1".into()));
        }
        if !(self.tail_cutoff_fraction > 0.0 && self.tail_cutoff_fraction <= 1e-3) {
            return Err(Error::InvalidConfig(format!(
                "tail_cutoff_fraction = {} must lie in (0, 1e-3]",
                self.tail_cutoff_fraction
            )));
        }
        Ok(())
    }

    /// Same spec with a different relative tolerance.
    pub fn with_rel_tol(mut self, rel_tol: f64) -> Self {
        self.rel_tol = rel_tol;
        self
    }
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_626_373_488,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for the odd-indexed Kronrod nodes.
#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[derive(Debug, Clone, Copy)]
struct Segment {
    lo: f64,
    hi: f64,
    value: f64,
    error: f64,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Segment {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = fc * WGK[10];
    let mut gauss = 0.0;
    for j in 0..10 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { lo, hi, value, error }
}

fn adapt<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<(f64, f64)> {
    let first = gauss_kronrod(f, lo, hi);
    if !first.value.is_finite() {
        return Err(Error::NonConvergence(format!("non-finite integrand on [{lo}, {hi}]")));
    }
    let mut segments = vec![first];
    let mut total = first.value;
    let mut total_err = first.error;
    // Segments too narrow to split further still count towards the error.
    let mut frozen_err = 0.0;
    loop {
        let tol = spec.abs_tol.max(spec.rel_tol * total.abs());
        if total_err + frozen_err <= tol {
            return Ok((total, total_err + frozen_err));
        }
        if segments.is_empty() {
            return Ok((total, frozen_err));
        }
        if segments.len() >= spec.max_subdivisions {
            return Err(Error::NonConvergence(format!(
                "[{lo}, {hi}]: estimate {total:e} with error {:e} after {} subdivisions",
                total_err + frozen_err,
                spec.max_subdivisions
            )));
        }
        let (worst, _) = segments
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |best, (i, s)| if s.error > best.1 { (i, s.error) } else { best });
        let seg = segments.swap_remove(worst);
        let mid = 0.5 * (seg.lo + seg.hi);
        if !(mid > seg.lo && mid < seg.hi) || (seg.hi - seg.lo) <= 1e-14 * seg.lo.abs().max(seg.hi.abs()) {
            frozen_err += seg.error;
            total_err -= seg.error;
            continue;
        }
        let left = gauss_kronrod(f, seg.lo, mid);
        let right = gauss_kronrod(f, mid, seg.hi);
        if !(left.value.is_finite() && right.value.is_finite()) {
            return Err(Error::NonConvergence(format!("non-finite integrand near [{}, {}]", seg.lo, seg.hi)));
        }
        total += left.value + right.value - seg.value;
        total_err += left.error + right.error - seg.error;
        segments.push(left);
        segments.push(right);
    }
}

/// ∫_lo^hi f(t) dt. `hi` may be `f64::INFINITY`, in which case the unit
/// length scale of [`integrate_semi_infinite`] is used.
pub fn integrate<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if hi.is_infinite() && hi > 0.0 {
        return integrate_semi_infinite(f, lo, 1.0, spec);
    }
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::domain("integrate", format!("unsupported limits [{lo}, {hi}]")));
    }
    if lo == hi {
        return Ok(0.0);
    }
    if lo > hi {
        return adapt(&f, hi, lo, spec).map(|(v, _)| -v);
    }
    adapt(&f, lo, hi, spec).map(|(v, _)| v)
}

/// ∫_lo^∞ f(t) dt by consecutive blocks `[lo, lo + scale]`, then widths
/// doubling. Summation stops after two consecutive blocks whose contribution,
/// and whose `|f(end)| × next width` remainder estimate, are both below
/// `tail_cutoff_fraction` of the accumulated value.
pub fn integrate_semi_infinite<F: Fn(f64) -> f64>(f: F, lo: f64, scale: f64, spec: &QuadratureSpec) -> Result<f64> {
    spec.validate()?;
    if !(scale > 0.0) || !lo.is_finite() {
        return Err(Error::domain("integrate_semi_infinite", "scale must be positive and lo finite"));
    }
    const MAX_BLOCKS: usize = 200;
    let mut acc = 0.0;
    let mut a = lo;
    let mut width = scale;
    let mut quiet = 0;
    for _ in 0..MAX_BLOCKS {
        let b = a + width;
        let (block, _) = adapt(&f, a, b, spec)?;
        acc += block;
        let remainder = f(b).abs() * 2.0 * width;
        if !remainder.is_finite() {
            return Err(Error::NonConvergence(format!("integrand not finite at {b}")));
        }
        let threshold = spec.tail_cutoff_fraction * acc.abs();
        let negligible = if acc == 0.0 {
            block.abs() <= spec.abs_tol && remainder <= spec.abs_tol
        } else {
            block.abs() <= threshold && remainder <= threshold
        };
        quiet = if negligible { quiet + 1 } else { 0 };
        if quiet >= 2 {
            return Ok(acc);
        }
        a = b;
        width *= 2.0;
    }
    Err(Error::NonConvergence(format!(
        "semi-infinite integral from {lo} did not settle after {MAX_BLOCKS} blocks (partial {acc:e})"
    )))
}

/// Integral over `[points[0], hi]` split at every interior breakpoint.
/// Breakpoints outside the range are ignored; `hi = ∞` uses `scale` for the
/// last piece.
pub fn integrate_piecewise<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    hi: f64,
    scale: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let Some(&lo) = points.first() else {
        return Err(Error::domain("integrate_piecewise", "at least one breakpoint (the lower limit) is required"));
    };
    let mut cuts: Vec<f64> = points.iter().copied().filter(|p| p.is_finite() && *p >= lo && *p < hi).collect();
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        total += integrate(&f, pair[0], pair[1], spec)?;
    }
    let last = *cuts.last().unwrap_or(&lo);
    total += if hi.is_infinite() {
        integrate_semi_infinite(&f, last, scale, spec)?
    } else {
        integrate(&f, last, hi, spec)?
    };
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn exponential_to_infinity() {
        let v = integrate(|t: f64| (-t).exp(), 0.0, f64::INFINITY, &QuadratureSpec::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rayleigh_normalization() {
        let lambda = 1e-3;
        let pdf = |t: f64| 2.0 * PI * lambda * t * (-PI * lambda * t * t).exp();
        let v = integrate(pdf, 0.0, f64::INFINITY, &QuadratureSpec::default()).unwrap();
        assert!((v - 1.0).abs() < 1e-10, "{v}");
    }

    #[test]
    fn finite_antiderivative() {
        let v = integrate(|t: f64| t * (-t * t).exp(), 0.0, 3.0, &QuadratureSpec::default()).unwrap();
        let exact = (1.0 - (-9.0f64).exp()) / 2.0;
        assert!((v - exact).abs() < 1e-13);
    }

    #[test]
    fn reversed_limits_flip_sign() {
        let spec = QuadratureSpec::default();
        let fwd = integrate(|t: f64| t.sin(), 0.0, 2.0, &spec).unwrap();
        let back = integrate(|t: f64| t.sin(), 2.0, 0.0, &spec).unwrap();
        assert!((fwd + back).abs() < 1e-14);
    }

    #[test]
    fn endpoint_singularity() {
        // ∫₀¹ t^{-1/2} dt = 2
        let v = integrate(|t: f64| t.powf(-0.5), 0.0, 1.0, &QuadratureSpec::default()).unwrap();
        assert!((v - 2.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn non_convergence_is_reported() {
        let spec = QuadratureSpec::new(1e-14, 0.0, 3, 1e-12).unwrap();
        let err = integrate(|t: f64| (50.0 * t).sin().abs(), 0.0, 10.0, &spec).unwrap_err();
        assert!(matches!(err, Error::NonConvergence(_)));
    }

    #[test]
    fn invalid_specs() {
        assert!(QuadratureSpec::new(0.0, 0.0, 10, 1e-6).is_err());
        assert!(QuadratureSpec::new(1e-8, -1.0, 10, 1e-6).is_err());
        assert!(QuadratureSpec::new(1e-8, 0.0, 0, 1e-6).is_err());
        assert!(QuadratureSpec::new(1e-8, 0.0, 10, 1e-2).is_err());
    }

    #[test]
    fn piecewise_matches_single() {
        let spec = QuadratureSpec::default();
        let f = |t: f64| if t < 1.0 { 1.0 } else { t.powi(-3) } * (-0.01 * t * t).exp();
        let whole = integrate_piecewise(f, &[0.0, 1.0], f64::INFINITY, 5.0, &spec).unwrap();
        let a = integrate(f, 0.0, 1.0, &spec).unwrap();
        let b = integrate_semi_infinite(f, 1.0, 5.0, &spec).unwrap();
        assert!((whole - a - b).abs() < 1e-14);
    }
}
