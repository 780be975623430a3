//! Point and long-run variance estimators.

mod hac;
mod ols;
mod symmetric;
mod trend;

pub use hac::{hac_gamma, hac_gamma_with, hac_products, long_run_raw, LongRunCov};
pub use ols::{ols_fit, OlsFit};
pub use symmetric::{check_symmetric, floor_eigenvalues, psd_inverse_sqrt, FlooredEigen};
pub use trend::{trend_fit, trend_tau2, trend_tau2_raw, TrendFit};

pub(crate) use hac::long_run_accumulate;
pub(crate) use trend::{index_weights, tau2_from_centered};

/// `floor(n^(1/3)) + 1`, computed with an exact integer cube root.
pub fn default_bandwidth(n: usize) -> usize {
    let mut r = (n as f64).cbrt().round() as usize;
    while r > 0 && r * r * r > n {
        r -= 1;
    }
    while (r + 1) * (r + 1) * (r + 1) <= n {
        r += 1;
    }
    r + 1
}

#[cfg(test)]
mod tests {
    use super::default_bandwidth;

    #[test]
    fn bandwidth_rule() {
        assert_eq!(default_bandwidth(8), 3);
        assert_eq!(default_bandwidth(100), 5);
        assert_eq!(default_bandwidth(1000), 11);
        assert_eq!(default_bandwidth(999), 10);
        assert_eq!(default_bandwidth(2), 2);
        assert_eq!(default_bandwidth(500), 8);
    }
}
