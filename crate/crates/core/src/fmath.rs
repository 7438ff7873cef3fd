//! Float helpers routed through `libm` so the core builds without `std`.

pub use libm::{atan, cos, exp, fabs as abs, log as ln, pow as powf, sin, sqrt, tanh};

/// `coth(x)` for `x > 0`.
pub fn coth(x: f64) -> f64 {
    1.0 / tanh(x)
}
