//! Chi-squared Wald test of `beta = 0` assuming i.i.d. Gaussian errors.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::outcome::{Method, TestOutcome};
use crate::error::{Error, Result};
use crate::estimators::{ols_fit, FlooredEigen};
use crate::model::Dataset;

/// Which quadratic form the statistic uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WaldForm {
    /// `(n / sigma_y2) beta' Sx beta`, chi-squared with `p` degrees of freedom under the null.
    #[default]
    Standard,
    /// `(n / sigma_y2) beta' Sx^-1 beta`.
    AsPrinted,
}

/// Upper `alpha` quantile of the chi-squared distribution with `df` degrees of freedom.
pub fn chi_square_critical(df: usize, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {alpha}")));
    }
    let dist = ChiSquared::new(df as f64)
        .map_err(|e| Error::InvalidConfig(format!("chi-squared with {df} degrees of freedom: {e}")))?;
    Ok(dist.inverse_cdf(1.0 - alpha))
}

pub fn classical_wald_test(data: &Dataset, alpha: f64) -> Result<TestOutcome> {
    classical_wald_test_with(data, alpha, WaldForm::Standard)
}

pub fn classical_wald_test_with(data: &Dataset, alpha: f64, form: WaldForm) -> Result<TestOutcome> {
    let critical = chi_square_critical(data.p(), alpha)?;
    let fit = ols_fit(data)?;
    if !(fit.sigma_y2 > 0.0) {
        return Err(Error::ZeroVariance("response is constant".into()));
    }
    let weight = match form {
        WaldForm::Standard => fit.sigma_x.clone(),
        WaldForm::AsPrinted => FlooredEigen::new(&fit.sigma_x, None)?.inverse(),
    };
    let quad = (fit.beta.transpose() * weight * &fit.beta)[(0, 0)];
    let statistic = data.n() as f64 * quad / fit.sigma_y2;
    let p_value = ChiSquared::new(data.p() as f64)
        .map(|d| d.sf(statistic))
        .unwrap_or(f64::NAN);
    Ok(TestOutcome {
        method: Method::ClassicalWald,
        statistic,
        p_value,
        reject: statistic > critical,
        alpha,
        n: data.n(),
        p: data.p(),
        bandwidth_used: None,
        floored: false,
        permutations: 0,
        perm_samples: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn critical_value_p3() {
        assert!((chi_square_critical(3, 0.05).unwrap() - 7.814_727_903).abs() < 1e-6);
    }

    #[test]
    fn zero_beta_never_rejects() {
        // y is orthogonal to the centered covariate.
        let rows: Vec<Vec<f64>> = [-2.0, -1.0, 0.0, 1.0, 2.0].iter().map(|&v| vec![v]).collect();
        let d = Dataset::from_rows(vec![1.0, -1.0, 0.0, -1.0, 1.0], &rows).unwrap();
        let out = classical_wald_test(&d, 0.05).unwrap();
        assert_eq!(out.statistic, 0.0);
        assert!(!out.reject);
        assert!((out.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn forms_agree_when_covariance_is_identity() {
        let rows: Vec<Vec<f64>> = [-1.0, 1.0, -1.0, 1.0].iter().map(|&v| vec![v]).collect();
        let d = Dataset::from_rows(vec![0.2, 1.0, -0.5, 0.4], &rows).unwrap();
        let a = classical_wald_test_with(&d, 0.05, WaldForm::Standard).unwrap();
        let b = classical_wald_test_with(&d, 0.05, WaldForm::AsPrinted).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-12);
    }
}
