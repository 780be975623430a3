//! Limiting power of the studentized trend test against local AR(1) alternatives.

use statrs::distribution::{ContinuousCDF, Normal};

fn standard_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal is valid")
}

/// `1 - Phi(z_{1-alpha} - nu * sqrt(12) / tau)` for drift `nu` and long-run sd `tau`.
pub fn local_power(nu: f64, tau: f64, alpha: f64) -> f64 {
    let z = standard_normal();
    1.0 - z.cdf(z.inverse_cdf(1.0 - alpha) - nu * 12f64.sqrt() / tau)
}

/// Power against `lambda_i = h i / n^{3/2}` added to an AR(1) with coefficient `rho`:
/// `1 - Phi(z_{1-alpha} - h (1-rho)^2 / sqrt(12))`.
pub fn theoretical_local_power(h: f64, rho: f64, alpha: f64) -> f64 {
    let z = standard_normal();
    1.0 - z.cdf(z.inverse_cdf(1.0 - alpha) - h * (1.0 - rho).powi(2) / 12f64.sqrt())
}
