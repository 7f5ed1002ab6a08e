//! Gauss hypergeometric function ₂F₁(a, b; c; z) on the negative real axis.

use crate::error::{Error, Result};

use super::gamma::gamma;

const SERIES_EPS: f64 = 1e-17;
const SHORT_SERIES: usize = 5_000;
const LONG_SERIES: usize = 2_000_000;

fn is_nonpositive_integer(v: f64) -> bool {
    v <= 0.0 && v == v.floor()
}

fn recip_gamma(v: f64) -> f64 {
    if is_nonpositive_integer(v) {
        0.0
    } else {
        1.0 / gamma(v)
    }
}

/// Plain power series; `None` when it fails to settle within `max_terms`.
fn series(a: f64, b: f64, c: f64, z: f64, max_terms: usize) -> Option<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut small_in_a_row = 0;
    for n in 0..max_terms {
        let n = n as f64;
        term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
        sum += term;
        if term == 0.0 {
            return Some(sum);
        }
        if term.abs() <= SERIES_EPS * sum.abs() {
            small_in_a_row += 1;
            if small_in_a_row >= 2 {
                return Some(sum);
            }
        } else {
            small_in_a_row = 0;
        }
    }
    None
}

/// ₂F₁(a, b; c; z) for `z ≤ 0`.
///
/// Uses the power series for `|z| ≤ 1/2`, the Pfaff transformation
/// `(1 − z)^{−a} ₂F₁(a, c − b; c; z/(z − 1))` for moderate `|z|`, and the
/// `1/z` connection formula once `z/(z − 1)` gets close to one (requires
/// `a − b` not an integer; otherwise a long Pfaff series is attempted).
pub fn gauss_2f1_negz(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    const NAME: &str = "gauss_2f1_negz";
    if !(c > 0.0) {
        return Err(Error::domain(NAME, format!("c = {c} must be positive")));
    }
    if !(z <= 0.0) {
        return Err(Error::domain(NAME, format!("z = {z} must be nonpositive")));
    }
    if !(a.is_finite() && b.is_finite() && c.is_finite() && z.is_finite()) {
        return Err(Error::domain(NAME, "arguments must be finite"));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    let non_convergent = || Error::NonConvergence(format!("2F1({a}, {b}; {c}; {z}) series"));

    if is_nonpositive_integer(a) || is_nonpositive_integer(b) {
        // terminating polynomial
        return series(a, b, c, z, LONG_SERIES).ok_or_else(non_convergent);
    }
    if z >= -0.5 {
        return series(a, b, c, z, SHORT_SERIES).ok_or_else(non_convergent);
    }
    let pfaff = |max_terms| {
        let zeta = z / (z - 1.0);
        series(a, c - b, c, zeta, max_terms).map(|s| (1.0 - z).powf(-a) * s)
    };
    if z >= -9.0 {
        return pfaff(SHORT_SERIES).ok_or_else(non_convergent);
    }
    let diff = a - b;
    if (diff - diff.round()).abs() > 1e-9 {
        let w = -z;
        let inv = 1.0 / z;
        let gc = gamma(c);
        let first = gc * gamma(b - a) * recip_gamma(b) * recip_gamma(c - a);
        let second = gc * gamma(a - b) * recip_gamma(a) * recip_gamma(c - b);
        let mut value = 0.0;
        if first != 0.0 {
            let s = series(a, a - c + 1.0, a - b + 1.0, inv, SHORT_SERIES).ok_or_else(non_convergent)?;
            value += first * w.powf(-a) * s;
        }
        if second != 0.0 {
            let s = series(b, b - c + 1.0, b - a + 1.0, inv, SHORT_SERIES).ok_or_else(non_convergent)?;
            value += second * w.powf(-b) * s;
        }
        return Ok(value);
    }
    pfaff(LONG_SERIES).ok_or_else(non_convergent)
}
