//! Permutation test of `beta = 0` in a regression of `Y` on `X`.
//!
//! Only the covariate cross-moment `s = (1/n) sum (Y_i - Ybar)(X_pi(i) - Xbar)`
//! and the long-run covariance change under a permutation of the covariate
//! rows, so the kernel centers the data once and re-evaluates those two
//! pieces per permutation. Since `Sx beta = s`, the quadratic statistic
//! `n beta' Sx G^-1 Sx beta` is evaluated as `n s' G^-1 s`.

use nalgebra::DMatrix;

use super::outcome::{Method, TestOutcome};
use crate::error::Result;
use crate::estimators::{long_run_accumulate, ols_fit, FlooredEigen};
use crate::model::{Dataset, Region, TestConfig, REGRESSION_FLOOR};
use crate::permutation::{draw_plan, finish, map_permutations, p_value, PermDistribution, PermutationPlan};
use crate::model::Tail;

/// Precomputed pieces of the regression statistic.
#[derive(Debug, Clone)]
pub struct RegressionKernel {
    n: usize,
    p: usize,
    xc: Vec<f64>,
    yc: Vec<f64>,
    sigma_x_inv: DMatrix<f64>,
    region: Region,
    bandwidth: Option<usize>,
    floor: Option<f64>,
    /// Eigendecomposition of `sigma_y2 * Sx` for the unstudentized statistic.
    fixed: Option<FlooredEigen>,
}

impl RegressionKernel {
    pub fn new(data: &Dataset, cfg: &TestConfig) -> Result<Self> {
        let fit = ols_fit(data)?;
        let (n, p) = (data.n(), data.p());
        let x = data.x();
        let mut xc = Vec::with_capacity(n * p);
        for i in 0..n {
            for j in 0..p {
                xc.push(x[(i, j)] - fit.x_mean[j]);
            }
        }
        let yc = data.y().iter().map(|v| v - fit.y_mean).collect();
        let sigma_x_inv = FlooredEigen::new(&fit.sigma_x, None)?.inverse();
        let floor = cfg.floor.resolve(REGRESSION_FLOOR);
        let (bandwidth, fixed) = if cfg.studentize {
            (Some(cfg.bandwidth.resolve(n)?), None)
        } else {
            (None, Some(FlooredEigen::new(&(&fit.sigma_x * fit.sigma_y2), floor)?))
        };
        Ok(Self {
            n,
            p,
            xc,
            yc,
            sigma_x_inv,
            region: cfg.region,
            bandwidth,
            floor,
            fixed,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bandwidth(&self) -> Option<usize> {
        self.bandwidth
    }

    /// Cross-moment `s` for the arrangement `perm`.
    pub fn cross_moment(&self, perm: &[usize]) -> Vec<f64> {
        let p = self.p;
        let mut s = vec![0.0; p];
        for (i, &src) in perm.iter().enumerate() {
            let row = &self.xc[src * p..(src + 1) * p];
            for (acc, v) in s.iter_mut().zip(row) {
                *acc += self.yc[i] * v;
            }
        }
        let n = self.n as f64;
        s.iter_mut().for_each(|v| *v /= n);
        s
    }

    /// Statistic on the arrangement `perm`, and whether the floor bound.
    pub fn evaluate(&self, perm: &[usize]) -> Result<(f64, bool)> {
        let s = self.cross_moment(perm);
        let eig = match (&self.fixed, self.bandwidth) {
            (Some(fixed), _) => fixed.clone(),
            (None, Some(b)) => FlooredEigen::new(&self.long_run(perm, &s, b), self.floor)?,
            (None, None) => unreachable!("studentized kernel always has a bandwidth"),
        };
        let n = self.n as f64;
        let stat = match self.region {
            Region::Sphere => n * eig.inverse_quadratic(&s),
            Region::Box => n.sqrt() * eig.whitened_max(&s),
        };
        Ok((stat, eig.floored))
    }

    fn long_run(&self, perm: &[usize], s: &[f64], b: usize) -> DMatrix<f64> {
        let p = self.p;
        let beta: Vec<f64> = (0..p)
            .map(|i| (0..p).map(|j| self.sigma_x_inv[(i, j)] * s[j]).sum())
            .collect();
        let mut u = Vec::with_capacity(self.n * p);
        for (i, &src) in perm.iter().enumerate() {
            let row = &self.xc[src * p..(src + 1) * p];
            let fitted: f64 = row.iter().zip(&beta).map(|(a, b)| a * b).sum();
            let e = self.yc[i] - fitted;
            u.extend(row.iter().map(|v| v * e));
        }
        let mut out = vec![0.0; p * p];
        long_run_accumulate(&u, self.n, p, b, &mut out);
        DMatrix::from_row_slice(p, p, &out)
    }

    /// Observed statistic plus its permutation distribution under `plan`.
    pub fn distribution(&self, plan: &PermutationPlan) -> Result<(PermDistribution, bool)> {
        let identity: Vec<usize> = (0..self.n).collect();
        let (observed, floored) = self.evaluate(&identity)?;
        let samples = map_permutations(plan, |perm| self.evaluate(perm).map(|(v, _)| v))?;
        Ok((finish(samples, observed, plan)?, floored))
    }
}

pub(crate) fn plan_for(n: usize, cfg: &TestConfig) -> Result<PermutationPlan> {
    Ok(draw_plan(n, cfg.permutations, cfg.seed, cfg.mode)?.with_identity(cfg.include_identity))
}

pub(crate) struct Shape {
    pub method: Method,
    pub n: usize,
    pub p: usize,
    pub bandwidth: Option<usize>,
}

pub(crate) fn permutation_outcome(
    shape: Shape,
    dist: PermDistribution,
    floored: bool,
    tail: Tail,
    cfg: &TestConfig,
) -> TestOutcome {
    let pv = p_value(&dist, tail);
    TestOutcome {
        method: shape.method,
        statistic: dist.observed,
        p_value: pv,
        reject: pv <= cfg.alpha,
        alpha: cfg.alpha,
        n: shape.n,
        p: shape.p,
        bandwidth_used: shape.bandwidth,
        floored,
        permutations: dist.samples.len(),
        perm_samples: cfg.keep_samples.then_some(dist.samples),
    }
}

/// Studentized (or unstudentized) permutation test of `beta = 0`.
pub fn regression_perm_test(data: &Dataset, cfg: &TestConfig) -> Result<TestOutcome> {
    cfg.validate()?;
    let kernel = RegressionKernel::new(data, cfg)?;
    let plan = plan_for(data.n(), cfg)?;
    let (dist, floored) = kernel.distribution(&plan)?;
    let method = if cfg.studentize {
        Method::PermRegStud
    } else {
        Method::PermRegUnstud
    };
    let shape = Shape {
        method,
        n: data.n(),
        p: data.p(),
        bandwidth: kernel.bandwidth(),
    };
    Ok(permutation_outcome(shape, dist, floored, Tail::Upper, cfg))
}
