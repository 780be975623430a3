//! Autocorrelation and cross-correlation tests expressed as regressions on
//! lagged, standardized columns.
//!
//! Both designs divide by standard deviations that are invariant under the
//! permutation, computed once on the observed data. The correlation vector is
//! the covariate cross-moment of the standardized design ([`lag_moments`]) and
//! the statistic is the studentized quadratic form `n rho' G^-1 rho`.

use nalgebra::DMatrix;

use super::outcome::{Method, TestOutcome};
use super::regression::{permutation_outcome, plan_for, RegressionKernel, Shape};
use crate::error::{Error, Result};
use crate::estimators::ols_fit;
use crate::model::{Dataset, Region, Series, Tail, TestConfig};

fn population_sd(values: impl Iterator<Item = f64> + Clone) -> f64 {
    let (sum, count) = values.clone().fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
    let mean = sum / count as f64;
    (values.map(|v| (v - mean).powi(2)).sum::<f64>() / count as f64).sqrt()
}

/// Rows `Y_i = T_{i+p} / sd`, `X_ij = T_{i+p-j} / sd` for `j = 1..p`, with `sd`
/// the (1/N) standard deviation of the whole series.
pub fn ljung_box_design(series: &Series, lags: usize) -> Result<Dataset> {
    if lags == 0 {
        return Err(Error::InvalidConfig("number of lags must be positive".into()));
    }
    let t = series.values();
    let total = t.len();
    if total < 2 * lags + 3 {
        return Err(Error::TooFewRows {
            n: total,
            required: 2 * lags + 3,
        });
    }
    let sd = population_sd(t.iter().copied());
    if !(sd > 0.0) {
        return Err(Error::ZeroVariance("series is constant".into()));
    }
    let n = total - lags;
    let y: Vec<f64> = (0..n).map(|i| t[i + lags] / sd).collect();
    let x = DMatrix::from_fn(n, lags, |i, j| t[i + lags - (j + 1)] / sd);
    Dataset::new(y, x)
}

/// Correlation vector of a standardized lag design: its covariate cross-moment.
pub fn lag_moments(design: &Dataset) -> Result<Vec<f64>> {
    Ok(ols_fit(design)?.cross.iter().copied().collect())
}

fn studentized_sphere(cfg: &TestConfig) -> TestConfig {
    TestConfig {
        studentize: true,
        region: Region::Sphere,
        ..cfg.clone()
    }
}

fn run_design(design: &Dataset, method: Method, p: usize, cfg: &TestConfig) -> Result<TestOutcome> {
    let cfg = studentized_sphere(cfg);
    let kernel = RegressionKernel::new(design, &cfg)?;
    let plan = plan_for(design.n(), &cfg)?;
    let (dist, floored) = kernel.distribution(&plan)?;
    let shape = Shape {
        method,
        n: design.n(),
        p,
        bandwidth: kernel.bandwidth(),
    };
    Ok(permutation_outcome(shape, dist, floored, Tail::Upper, &cfg))
}

/// Joint test that the first `lags` autocorrelations vanish.
pub fn ljung_box_perm_test(series: &Series, lags: usize, cfg: &TestConfig) -> Result<TestOutcome> {
    cfg.validate()?;
    let total = series.len();
    let rows = total.saturating_sub(lags);
    let b = if rows > 1 { cfg.bandwidth.resolve(rows).unwrap_or(rows) } else { rows };
    let required = lags + 3 + b;
    if total < required {
        return Err(Error::TooFewRows { n: total, required });
    }
    let design = ljung_box_design(series, lags)?;
    run_design(&design, Method::PermLjungBox, lags, cfg)
}

/// Design whose columns are `X_{i-r, j}` for every covariate `j` and lag `r`,
/// with the first `max(lags)` rows dropped and every column standardized.
pub fn cross_correlation_design(data: &Dataset, lags: &[usize]) -> Result<Dataset> {
    if lags.is_empty() {
        return Err(Error::InvalidConfig("at least one lag is required".into()));
    }
    let max_lag = *lags.iter().max().expect("nonempty");
    let (n, p) = (data.n(), data.p());
    let cols = p * lags.len();
    let required = max_lag + cols + 3;
    if n < required {
        return Err(Error::TooFewRows { n, required });
    }
    let rows = n - max_lag;
    let y = data.y();
    let x = data.x();
    let ys: Vec<f64> = (max_lag..n).map(|i| y[i]).collect();
    let y_sd = population_sd(ys.iter().copied());
    if !(y_sd > 0.0) {
        return Err(Error::ZeroVariance("response is constant".into()));
    }
    let mut design = DMatrix::zeros(rows, cols);
    for j in 0..p {
        for (k, &r) in lags.iter().enumerate() {
            let col = j * lags.len() + k;
            let values = (max_lag..n).map(|i| x[(i - r, j)]);
            let sd = population_sd(values.clone());
            if !(sd > 0.0) {
                return Err(Error::ZeroVariance(format!(
                    "covariate column {} at lag {r} is constant",
                    j + 1
                )));
            }
            for (i, v) in values.enumerate() {
                design[(i, col)] = v / sd;
            }
        }
    }
    Dataset::new(ys.iter().map(|v| v / y_sd).collect(), design)
}

/// Joint test that the (lagged) cross-correlations of `Y` with every covariate vanish.
pub fn cross_correlation_perm_test(data: &Dataset, lags: &[usize], cfg: &TestConfig) -> Result<TestOutcome> {
    cfg.validate()?;
    let design = cross_correlation_design(data, lags)?;
    let p = design.p();
    run_design(&design, Method::PermCrossCorr, p, cfg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypothesis::regression_perm_test;

    fn wiggly(n: usize) -> Series {
        Series::new((0..n).map(|i| ((i * i) as f64 * 0.37).sin() + 0.1 * i as f64 % 1.3).collect()).unwrap()
    }

    #[test]
    fn single_lag_matches_regression_path() {
        let s = wiggly(50);
        let cfg = TestConfig { permutations: 200, seed: 5, ..TestConfig::default() };
        let lb = ljung_box_perm_test(&s, 1, &cfg).unwrap();
        let design = ljung_box_design(&s, 1).unwrap();
        let reg = regression_perm_test(&design, &cfg).unwrap();
        assert_eq!(lb.statistic, reg.statistic);
        assert_eq!(lb.p_value, reg.p_value);
        assert_eq!(lb.method, Method::PermLjungBox);
    }

    #[test]
    fn lag_moments_are_autocorrelation_like() {
        let s = wiggly(40);
        let d = ljung_box_design(&s, 2).unwrap();
        let rho = lag_moments(&d).unwrap();
        assert_eq!(rho.len(), 2);
        assert!(rho.iter().all(|r| r.abs() <= 1.5));
    }

    #[test]
    fn too_short_series() {
        let s = wiggly(8);
        assert_eq!(ljung_box_perm_test(&s, 3, &TestConfig::default()).unwrap_err().code(), "TOO_FEW_ROWS");
    }

    #[test]
    fn duplicated_column_is_singular() {
        let rows: Vec<Vec<f64>> = (0..12).map(|i| {
            let v = (i as f64 * 0.9).cos();
            vec![v, v]
        }).collect();
        let y: Vec<f64> = (0..12).map(|i| (i as f64 * 1.3).sin()).collect();
        let d = Dataset::from_rows(y, &rows).unwrap();
        assert_eq!(
            cross_correlation_perm_test(&d, &[0], &TestConfig::default()).unwrap_err().code(),
            "SINGULAR_COVARIANCE"
        );
    }

    #[test]
    fn lag_columns_point_to_the_past() {
        let rows: Vec<Vec<f64>> = (0..10).map(|i| vec![(i * i % 7) as f64]).collect();
        let y: Vec<f64> = (0..10).map(|i| (i % 3) as f64).collect();
        let d = Dataset::from_rows(y, &rows).unwrap();
        let design = cross_correlation_design(&d, &[0, 2]).unwrap();
        assert_eq!((design.n(), design.p()), (8, 2));
        // column 1 at row i holds X_{i+2-2}; compare standardized shapes via ratios
        let x0: Vec<f64> = (0..8).map(|i| d.x()[(i, 0)]).collect();
        let c1: Vec<f64> = design.x().column(1).iter().copied().collect();
        let sd = population_sd(x0.iter().copied());
        for (a, b) in x0.iter().zip(&c1) {
            assert!((a / sd - b).abs() < 1e-12);
        }
    }
}
