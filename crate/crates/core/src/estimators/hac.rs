//! Truncated long-run covariance of the score vectors `(X_l - Xbar) e_l`.
//!
//! With centered scores `c_l`,
//!
//! ```text
//! gamma = (1/n) sum_l c_l c_l'
//! tau   = (2/n) sum_{k=1..b} sum_{l=1..min(n-k, n-b)} c_l c_{l+k}'
//! ```
//!
//! and the estimate is the symmetric part of `gamma + tau`. Since `k <= b` the
//! inner limit is always `n - b`, which lets `tau` be accumulated against a
//! sliding window sum of the next `b` scores.

use nalgebra::DMatrix;

use super::symmetric::FlooredEigen;
use super::OlsFit;
use crate::error::{Error, Result};
use crate::model::Dataset;

/// A floored long-run covariance estimate (`1 x 1` for scalar series).
#[derive(Debug, Clone, PartialEq)]
pub struct LongRunCov {
    pub matrix: DMatrix<f64>,
    /// Symmetrized estimate before flooring.
    pub raw: DMatrix<f64>,
    pub bandwidth: usize,
    pub floor: Option<f64>,
    pub floored: bool,
}

impl LongRunCov {
    pub(crate) fn from_raw(raw: DMatrix<f64>, bandwidth: usize, floor: Option<f64>) -> Result<Self> {
        let eig = FlooredEigen::new(&raw, floor)?;
        let matrix = if eig.floored { eig.matrix() } else { raw.clone() };
        Ok(Self {
            matrix,
            raw,
            bandwidth,
            floor,
            floored: eig.floored,
        })
    }
}

pub(crate) fn check_bandwidth(bandwidth: usize, n: usize) -> Result<()> {
    if bandwidth == 0 {
        return Err(Error::InvalidConfig("bandwidth must be positive".into()));
    }
    if bandwidth >= n {
        return Err(Error::BandwidthTooLarge { bandwidth, n });
    }
    Ok(())
}

/// Row-major `n x p` scores `(X_l - Xbar) e_l` for a fitted dataset.
pub fn hac_products(data: &Dataset, fit: &OlsFit) -> Vec<f64> {
    let (n, p) = (data.n(), data.p());
    let x = data.x();
    let mut u = Vec::with_capacity(n * p);
    for l in 0..n {
        for j in 0..p {
            u.push((x[(l, j)] - fit.x_mean[j]) * fit.residuals[l]);
        }
    }
    u
}

/// Symmetrized `gamma + tau` from row-major scores `u` (centered internally).
pub fn long_run_raw(u: &[f64], n: usize, p: usize, bandwidth: usize) -> DMatrix<f64> {
    let mut acc = vec![0.0; p * p];
    long_run_accumulate(u, n, p, bandwidth, &mut acc);
    DMatrix::from_row_slice(p, p, &acc)
}

/// Writes the symmetrized estimate into a row-major `p x p` buffer.
pub(crate) fn long_run_accumulate(u: &[f64], n: usize, p: usize, b: usize, out: &mut [f64]) {
    debug_assert_eq!(u.len(), n * p);
    debug_assert!(b >= 1 && b < n);
    let mut mean = vec![0.0; p];
    for row in u.chunks_exact(p) {
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut c = u.to_vec();
    for row in c.chunks_exact_mut(p) {
        for (v, m) in row.iter_mut().zip(&mean) {
            *v -= m;
        }
    }

    let mut gamma = vec![0.0; p * p];
    for row in c.chunks_exact(p) {
        for i in 0..p {
            for j in i..p {
                gamma[i * p + j] += row[i] * row[j];
            }
        }
    }

    // window = c_{l+1} + ... + c_{l+b}
    let mut window = vec![0.0; p];
    for row in c[p..(b + 1) * p].chunks_exact(p) {
        for (w, v) in window.iter_mut().zip(row) {
            *w += v;
        }
    }
    let mut tau = vec![0.0; p * p];
    for l in 0..n - b {
        let cl = &c[l * p..(l + 1) * p];
        for i in 0..p {
            for j in 0..p {
                tau[i * p + j] += cl[i] * window[j];
            }
        }
        if l + 1 < n - b {
            let leaving = &c[(l + 1) * p..(l + 2) * p];
            let entering = &c[(l + b + 1) * p..(l + b + 2) * p];
            for j in 0..p {
                window[j] += entering[j] - leaving[j];
            }
        }
    }

    let nf = n as f64;
    for i in 0..p {
        for j in i..p {
            let v = gamma[i * p + j] / nf + (tau[i * p + j] + tau[j * p + i]) / nf;
            out[i * p + j] = v;
            out[j * p + i] = v;
        }
    }
}

/// Long-run covariance of the regression scores, eigenvalue-floored at `floor`.
pub fn hac_gamma(data: &Dataset, fit: &OlsFit, bandwidth: usize, floor: f64) -> Result<LongRunCov> {
    hac_gamma_with(data, fit, bandwidth, Some(floor))
}

/// As [`hac_gamma`]; `floor = None` disables flooring.
pub fn hac_gamma_with(
    data: &Dataset,
    fit: &OlsFit,
    bandwidth: usize,
    floor: Option<f64>,
) -> Result<LongRunCov> {
    check_bandwidth(bandwidth, data.n())?;
    let u = hac_products(data, fit);
    let raw = long_run_raw(&u, data.n(), data.p(), bandwidth);
    LongRunCov::from_raw(raw, bandwidth, floor)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::estimators::ols_fit;

    fn brute(u: &[f64], n: usize, p: usize, b: usize) -> DMatrix<f64> {
        let mean: Vec<f64> = (0..p).map(|j| (0..n).map(|l| u[l * p + j]).sum::<f64>() / n as f64).collect();
        let c = |l: usize, j: usize| u[l * p + j] - mean[j];
        DMatrix::from_fn(p, p, |i, j| {
            let g: f64 = (0..n).map(|l| c(l, i) * c(l, j)).sum::<f64>() / n as f64;
            let mut t = 0.0;
            let mut tt = 0.0;
            for k in 1..=b {
                for l in 0..(n - k).min(n - b) {
                    t += c(l, i) * c(l + k, j);
                    tt += c(l, j) * c(l + k, i);
                }
            }
            g + (t + tt) / n as f64
        })
    }

    #[test]
    fn sliding_window_matches_double_sum() {
        let n = 11;
        let p = 2;
        let u: Vec<f64> = (0..n * p).map(|k| ((k * 37 % 13) as f64 - 6.0) / 3.0).collect();
        for b in 1..n {
            let fast = long_run_raw(&u, n, p, b);
            assert!((fast - brute(&u, n, p, b)).amax() < 1e-12, "b = {b}");
        }
    }

    #[test]
    fn perfect_fit_floors_to_identity() {
        let rows: Vec<Vec<f64>> = (0..6).map(|i| vec![i as f64, ((i * i) % 5) as f64]).collect();
        let y: Vec<f64> = rows.iter().map(|r| 2.0 * r[0] - r[1] + 1.0).collect();
        let d = Dataset::from_rows(y, &rows).unwrap();
        let fit = ols_fit(&d).unwrap();
        let g = hac_gamma(&d, &fit, 2, 1e-4).unwrap();
        assert!(g.raw.amax() < 1e-20);
        assert!(g.floored);
        assert!((g.matrix.clone() - DMatrix::identity(2, 2) * 1e-4).amax() < 1e-18);
    }

    #[test]
    fn bandwidth_must_be_below_n() {
        let rows: Vec<Vec<f64>> = (0..5).map(|i| vec![(i * i) as f64]).collect();
        let d = Dataset::from_rows(vec![1.0, 0.0, 2.0, 1.0, 3.0], &rows).unwrap();
        let fit = ols_fit(&d).unwrap();
        assert_eq!(
            hac_gamma(&d, &fit, 5, 1e-4).unwrap_err(),
            Error::BandwidthTooLarge { bandwidth: 5, n: 5 }
        );
    }
}
