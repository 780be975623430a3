//! Brute-force oracles shared by the integration tests. Everything here is
//! written as plain loops over the textbook formulas, independent of the
//! library's linear algebra.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha20Rng {
    ChaCha20Rng::seed_from_u64(seed)
}

pub fn gaussians(rng: &mut ChaCha20Rng, len: usize) -> Vec<f64> {
    (0..len).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Solves `a x = b` by Gauss-Jordan elimination with partial pivoting.
pub fn solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let p = b.len();
    let mut m: Vec<Vec<f64>> = a
        .iter()
        .zip(b)
        .map(|(row, &rhs)| {
            let mut r = row.clone();
            r.push(rhs);
            r
        })
        .collect();
    for col in 0..p {
        let pivot = (col..p)
            .max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))
            .unwrap();
        m.swap(col, pivot);
        let d = m[col][col];
        for k in col..=p {
            m[col][k] /= d;
        }
        for r in 0..p {
            if r != col {
                let f = m[r][col];
                for k in col..=p {
                    m[r][k] -= f * m[col][k];
                }
            }
        }
    }
    m.into_iter().map(|r| r[p]).collect()
}

/// Least squares with intercept on rows `x`: returns (slope, centered residuals).
pub fn ols_oracle(y: &[f64], x: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    let n = y.len();
    let p = x[0].len();
    let ybar = mean(y);
    let xbar: Vec<f64> = (0..p).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let mut sxx = vec![vec![0.0; p]; p];
    let mut sxy = vec![0.0; p];
    for i in 0..n {
        for a in 0..p {
            sxy[a] += (x[i][a] - xbar[a]) * (y[i] - ybar);
            for b in 0..p {
                sxx[a][b] += (x[i][a] - xbar[a]) * (x[i][b] - xbar[b]);
            }
        }
    }
    let beta = solve(&sxx, &sxy);
    let resid = (0..n)
        .map(|i| {
            let fitted: f64 = (0..p).map(|j| (x[i][j] - xbar[j]) * beta[j]).sum();
            (y[i] - ybar) - fitted
        })
        .collect();
    (beta, resid)
}

/// Literal double sums for `gamma + tau`, symmetrized. Products use centered
/// covariates and centered residuals.
pub fn hac_oracle(y: &[f64], x: &[Vec<f64>], b: usize) -> Vec<Vec<f64>> {
    let n = y.len();
    let p = x[0].len();
    let (_, e) = ols_oracle(y, x);
    let xbar: Vec<f64> = (0..p).map(|j| x.iter().map(|r| r[j]).sum::<f64>() / n as f64).collect();
    let prod = |l: usize, i: usize| (x[l][i] - xbar[i]) * e[l];
    let avg = |i: usize| (0..n).map(|r| prod(r, i)).sum::<f64>() / n as f64;
    let nf = n as f64;
    let mut g = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            let mut gamma = 0.0;
            for l in 0..n {
                gamma += (prod(l, i) - avg(i)) * (prod(l, j) - avg(j));
            }
            let mut tau = 0.0;
            for k in 1..=b {
                for l in 0..(n - k).min(n - b) {
                    tau += (prod(l, i) - avg(i)) * (prod(l + k, j) - avg(j));
                }
            }
            g[i][j] = gamma / nf + 2.0 * tau / nf;
        }
    }
    let mut s = g.clone();
    for i in 0..p {
        for j in 0..p {
            s[i][j] = (g[i][j] + g[j][i]) / 2.0;
        }
    }
    s
}

/// Literal double sum for the trend long-run variance.
pub fn tau2_oracle(v: &[f64], b: usize) -> f64 {
    let n = v.len();
    let m = mean(v);
    let mut first = 0.0;
    for x in v {
        first += (x - m) * (x - m);
    }
    let mut second = 0.0;
    for i in 1..=b {
        for j in 0..n - i {
            second += (v[j] - m) * (v[j + i] - m);
        }
    }
    first / n as f64 + 2.0 * second / n as f64
}

/// `n^{-3/2} sum (i - (n+1)/2)(Y_i - Ybar)`.
pub fn t_stat_oracle(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = mean(v);
    v.iter()
        .enumerate()
        .map(|(i, x)| (i as f64 + 1.0 - (n + 1.0) / 2.0) * (x - m))
        .sum::<f64>()
        / n.powf(1.5)
}

/// All permutations of `0..n` by Heap's algorithm.
pub fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut a: Vec<usize> = (0..n).collect();
    let mut out = vec![a.clone()];
    let mut c = vec![0; n];
    let mut i = 0;
    while i < n {
        if c[i] < i {
            if i % 2 == 0 {
                a.swap(0, i);
            } else {
                a.swap(c[i], i);
            }
            out.push(a.clone());
            c[i] += 1;
            i = 0;
        } else {
            c[i] = 0;
            i += 1;
        }
    }
    out
}

/// Standard normal CDF by composite Simpson integration of the density.
pub fn normal_cdf(x: f64) -> f64 {
    if x.abs() > 10.0 {
        return if x > 0.0 { 1.0 } else { 0.0 };
    }
    let steps = 4000;
    let h = x.abs() / steps as f64;
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut s = phi(0.0) + phi(x.abs());
    for k in 1..steps {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        s += w * phi(k as f64 * h);
    }
    let half = s * h / 3.0;
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Kolmogorov-Smirnov distance of a sample from `N(0, var)`.
pub fn ks_normal(sample: &[f64], var: f64) -> f64 {
    let mut s = sample.to_vec();
    s.sort_by(f64::total_cmp);
    let m = s.len() as f64;
    let sd = var.sqrt();
    s.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = normal_cdf(x / sd);
            (f - i as f64 / m).abs().max((f - (i as f64 + 1.0) / m).abs())
        })
        .fold(0.0, f64::max)
}

/// Relative distance, scaled by `scale` when that is larger than the values.
pub fn rel_err(a: f64, b: f64, scale: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(scale).max(f64::MIN_POSITIVE)
}
