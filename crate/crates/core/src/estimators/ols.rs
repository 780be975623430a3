//! Least squares with an intercept, in centered-moment form.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::model::Dataset;

/// Relative eigenvalue threshold below which the covariate covariance is singular.
const SINGULAR_RTOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    pub beta: DVector<f64>,
    /// `(Y_i - Ybar) - (X_i - Xbar)' beta`.
    pub residuals: DVector<f64>,
    /// `(1/n) sum (X_i - Xbar)(X_i - Xbar)'`.
    pub sigma_x: DMatrix<f64>,
    /// `(1/n) sum (Y_i - Ybar)^2`.
    pub sigma_y2: f64,
    pub x_mean: DVector<f64>,
    pub y_mean: f64,
    /// `(1/n) sum (Y_i - Ybar)(X_i - Xbar)`, equal to `sigma_x * beta`.
    pub cross: DVector<f64>,
}

fn column_means(x: &DMatrix<f64>) -> DVector<f64> {
    let n = x.nrows() as f64;
    DVector::from_iterator(x.ncols(), x.column_iter().map(|c| c.sum() / n))
}

/// Centered covariate covariance.
fn covariate_covariance(x: &DMatrix<f64>, x_mean: &DVector<f64>) -> DMatrix<f64> {
    let n = x.nrows();
    let p = x.ncols();
    let mut s = DMatrix::zeros(p, p);
    for i in 0..n {
        for a in 0..p {
            let da = x[(i, a)] - x_mean[a];
            for b in a..p {
                s[(a, b)] += da * (x[(i, b)] - x_mean[b]);
            }
        }
    }
    for a in 0..p {
        for b in a..p {
            s[(a, b)] /= n as f64;
            s[(b, a)] = s[(a, b)];
        }
    }
    s
}

/// Fails with `SINGULAR_COVARIANCE` if the smallest eigenvalue is at or below
/// `1e-12` times the largest.
fn ensure_nonsingular(sigma_x: &DMatrix<f64>) -> Result<()> {
    let values = SymmetricEigen::new(sigma_x.clone()).eigenvalues;
    let max = values.max();
    let min = values.min();
    if !(max > 0.0) || min <= SINGULAR_RTOL * max {
        return Err(Error::SingularCovariance(format!(
            "covariate covariance has eigenvalues in [{min:e}, {max:e}]; covariates are collinear or constant"
        )));
    }
    Ok(())
}

pub fn ols_fit(data: &Dataset) -> Result<OlsFit> {
    let x = data.x();
    let y = data.y();
    let n = data.n();
    let p = data.p();
    let x_mean = column_means(x);
    let y_mean = y.mean();
    let sigma_x = covariate_covariance(x, &x_mean);
    ensure_nonsingular(&sigma_x)?;

    let mut cross = DVector::zeros(p);
    let mut sigma_y2 = 0.0;
    for i in 0..n {
        let dy = y[i] - y_mean;
        sigma_y2 += dy * dy;
        for j in 0..p {
            cross[j] += dy * (x[(i, j)] - x_mean[j]);
        }
    }
    cross /= n as f64;
    sigma_y2 /= n as f64;

    let beta = sigma_x
        .clone()
        .cholesky()
        .ok_or_else(|| Error::SingularCovariance("covariate covariance is not positive definite".into()))?
        .solve(&cross);

    let residuals = DVector::from_fn(n, |i, _| {
        let fitted: f64 = (0..p).map(|j| (x[(i, j)] - x_mean[j]) * beta[j]).sum();
        (y[i] - y_mean) - fitted
    });

    Ok(OlsFit {
        beta,
        residuals,
        sigma_x,
        sigma_y2,
        x_mean,
        y_mean,
        cross,
    })
}
