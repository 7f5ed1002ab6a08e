//! Special functions and numerical integration used by the closed-form
//! expressions.

mod gamma;
mod hypergeometric;
mod quadrature;

pub use gamma::{gamma, ln_gamma, lower_incomplete_gamma, upper_incomplete_gamma, upper_incomplete_gamma_ext};
pub use hypergeometric::gauss_2f1_negz;
pub use quadrature::{integrate, integrate_piecewise, integrate_semi_infinite, QuadratureSpec};
