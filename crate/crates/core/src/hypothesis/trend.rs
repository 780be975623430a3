//! Permutation test for the absence of a monotone trend.
//!
//! The permutation acts on the series itself. The unstudentized statistic is
//! `T_n = n^-3/2 sum (i - (n+1)/2)(Y_i - Ybar)`; the studentized one is
//! `n^{3/2} beta / (sqrt(12) tau)` with `tau^2` recomputed on each permuted series.

use super::outcome::{Method, TestOutcome};
use super::regression::{permutation_outcome, plan_for, Shape};
use crate::error::{Error, Result};
use crate::estimators::{index_weights, tau2_from_centered};
use crate::model::{Series, TestConfig, TREND_FLOOR};
use crate::permutation::{finish, map_permutations, PermDistribution, PermutationPlan};

#[derive(Debug, Clone)]
pub struct TrendKernel {
    n: usize,
    centered: Vec<f64>,
    weights: Vec<f64>,
    bandwidth: Option<usize>,
    floor: Option<f64>,
}

impl TrendKernel {
    pub fn new(series: &Series, cfg: &TestConfig) -> Result<Self> {
        let n = series.len();
        let mean = series.mean();
        let centered: Vec<f64> = series.values().iter().map(|v| v - mean).collect();
        let bandwidth = if cfg.studentize {
            Some(cfg.bandwidth.resolve(n)?)
        } else {
            if centered.iter().all(|&v| v == 0.0) {
                return Err(Error::ZeroVariance("series is constant".into()));
            }
            None
        };
        Ok(Self {
            n,
            centered,
            weights: index_weights(n),
            bandwidth,
            floor: cfg.floor.resolve(TREND_FLOOR),
        })
    }

    pub fn bandwidth(&self) -> Option<usize> {
        self.bandwidth
    }

    pub fn evaluate(&self, perm: &[usize]) -> Result<(f64, bool)> {
        let nf = self.n as f64;
        let Some(b) = self.bandwidth else {
            let num: f64 = self.weights.iter().zip(perm).map(|(w, &j)| w * self.centered[j]).sum();
            return Ok((num / nf.powf(1.5), false));
        };
        let c: Vec<f64> = perm.iter().map(|&j| self.centered[j]).collect();
        let num: f64 = self.weights.iter().zip(&c).map(|(w, v)| w * v).sum();
        let beta = num / (nf * (nf * nf - 1.0) / 12.0);
        let raw = tau2_from_centered(&c, b);
        let (tau2, floored) = match self.floor {
            Some(eps) if raw < eps || raw.is_nan() => (eps, true),
            Some(_) => (raw, false),
            None if raw > 0.0 => (raw, false),
            None => {
                return Err(Error::ZeroVariance(format!(
                    "long-run variance estimate {raw:e} is not positive and flooring is off"
                )))
            }
        };
        Ok((nf.powf(1.5) * beta / (12f64.sqrt() * tau2.sqrt()), floored))
    }

    pub fn distribution(&self, plan: &PermutationPlan) -> Result<(PermDistribution, bool)> {
        let identity: Vec<usize> = (0..self.n).collect();
        let (observed, floored) = self.evaluate(&identity)?;
        let samples = map_permutations(plan, |perm| self.evaluate(perm).map(|(v, _)| v))?;
        Ok((finish(samples, observed, plan)?, floored))
    }
}

pub fn trend_perm_test(series: &Series, cfg: &TestConfig) -> Result<TestOutcome> {
    cfg.validate()?;
    let kernel = TrendKernel::new(series, cfg)?;
    let plan = plan_for(series.len(), cfg)?;
    let (dist, floored) = kernel.distribution(&plan)?;
    let method = if cfg.studentize {
        Method::PermTrendStud
    } else {
        Method::PermTrendUnstud
    };
    let shape = Shape {
        method,
        n: series.len(),
        p: 1,
        bandwidth: kernel.bandwidth(),
    };
    Ok(permutation_outcome(shape, dist, floored, cfg.tail, cfg))
}
