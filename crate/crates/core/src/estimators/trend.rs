//! Least-squares slope on the time index and its long-run variance.

use nalgebra::DMatrix;

use super::hac::{check_bandwidth, LongRunCov};
use crate::error::Result;
use crate::model::Series;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrendFit {
    pub beta: f64,
    /// `n^-3/2 sum (i - (n+1)/2)(Y_i - Ybar)`.
    pub t_stat: f64,
    pub n: usize,
}

/// `i - (n+1)/2` for `i = 1..n`.
pub(crate) fn index_weights(n: usize) -> Vec<f64> {
    let mid = (n as f64 + 1.0) / 2.0;
    (1..=n).map(|i| i as f64 - mid).collect()
}

pub fn trend_fit(series: &Series) -> TrendFit {
    let y = series.values();
    let n = y.len();
    let mean = series.mean();
    let num: f64 = index_weights(n).iter().zip(y).map(|(w, v)| w * (v - mean)).sum();
    let nf = n as f64;
    let denom = nf * (nf * nf - 1.0) / 12.0;
    TrendFit {
        beta: num / denom,
        t_stat: num / nf.powf(1.5),
        n,
    }
}

/// `(1/n) sum c_j^2 + (2/n) sum_{i=1..b} sum_{j=1..n-i} c_j c_{j+i}` for centered `c`.
pub(crate) fn tau2_from_centered(c: &[f64], b: usize) -> f64 {
    let n = c.len();
    let var: f64 = c.iter().map(|v| v * v).sum();
    let mut cross = 0.0;
    for i in 1..=b {
        cross += c[..n - i].iter().zip(&c[i..]).map(|(a, b)| a * b).sum::<f64>();
    }
    (var + 2.0 * cross) / n as f64
}

/// Unfloored long-run variance estimate of a series.
pub fn trend_tau2_raw(values: &[f64], bandwidth: usize) -> Result<f64> {
    check_bandwidth(bandwidth, values.len())?;
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let c: Vec<f64> = values.iter().map(|v| v - mean).collect();
    Ok(tau2_from_centered(&c, bandwidth))
}

/// Long-run variance of a series, floored at `floor`.
pub fn trend_tau2(series: &Series, bandwidth: usize, floor: f64) -> Result<LongRunCov> {
    let raw = trend_tau2_raw(series.values(), bandwidth)?;
    LongRunCov::from_raw(DMatrix::from_element(1, 1, raw), bandwidth, Some(floor))
}
