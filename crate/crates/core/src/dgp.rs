//! Seeded simulation designs.
//!
//! Every generator draws from a single stream seeded by the caller, so the
//! output is a pure function of its arguments.

use std::fmt;

use nalgebra::{DMatrix, Matrix3, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Dataset, Series};
use crate::rng;

fn default_p() -> usize {
    3
}

/// Simulation design, tagged by `kind` when serialized.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DgpKind {
    /// `Y = T e_{p+1}`, `X_j = T e_j` with a shared m-dependent Gaussian product `T`.
    MdepRegression {
        m: usize,
        #[serde(default = "default_p")]
        p: usize,
    },
    /// Three-dimensional `X_t = R X_{t-2} + e_t` with response `Y_t = X_{t+1,1}`.
    Var2 { rho: f64 },
    /// Stationary Gaussian AR(1) series.
    Ar1 { rho: f64 },
    /// Series `X_t = Z_t Z_{t+1} ... Z_{t+m}`.
    MdepSeries { m: usize },
    /// Independent standard Gaussians: a series, or a dataset with `p` covariates.
    IidGauss {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        p: Option<usize>,
    },
}

impl DgpKind {
    pub fn produces_series(&self) -> bool {
        matches!(
            self,
            DgpKind::Ar1 { .. } | DgpKind::MdepSeries { .. } | DgpKind::IidGauss { p: None }
        )
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            DgpKind::Var2 { rho } | DgpKind::Ar1 { rho } if !(rho.abs() < 1.0) => {
                Err(Error::InvalidConfig(format!("rho must lie in (-1, 1), got {rho}")))
            }
            DgpKind::MdepRegression { p: 0, .. } | DgpKind::IidGauss { p: Some(0) } => {
                Err(Error::InvalidConfig("p must be at least 1".into()))
            }
            _ => Ok(()),
        }
    }
}

impl fmt::Display for DgpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DgpKind::MdepRegression { m, p } => write!(f, "mdep_regression(m={m},p={p})"),
            DgpKind::Var2 { rho } => write!(f, "var2(rho={rho})"),
            DgpKind::Ar1 { rho } => write!(f, "ar1(rho={rho})"),
            DgpKind::MdepSeries { m } => write!(f, "mdep_series(m={m})"),
            DgpKind::IidGauss { p: None } => write!(f, "iid_gauss"),
            DgpKind::IidGauss { p: Some(p) } => write!(f, "iid_gauss(p={p})"),
        }
    }
}

/// Deterministic trend added to a simulated series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TrendSpec {
    /// `lambda_i = h i / n^{3/2}`.
    Local { h: f64 },
    /// `lambda_i = g(i/n)`, with `g` tabulated on an even grid of `[0, 1]` and
    /// linearly interpolated. Must be monotone.
    Tabulated { g: Vec<f64> },
}

impl TrendSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            TrendSpec::Local { h } if !h.is_finite() => {
                Err(Error::InvalidConfig(format!("trend h must be finite, got {h}")))
            }
            TrendSpec::Local { .. } => Ok(()),
            TrendSpec::Tabulated { g } => {
                if g.len() < 2 {
                    return Err(Error::InvalidConfig("tabulated trend needs at least two points".into()));
                }
                if g.iter().any(|v| !v.is_finite()) {
                    return Err(Error::NonFiniteValue {
                        location: "tabulated trend".into(),
                    });
                }
                let up = g.windows(2).all(|w| w[1] >= w[0]);
                let down = g.windows(2).all(|w| w[1] <= w[0]);
                if up || down {
                    Ok(())
                } else {
                    Err(Error::NonMonotoneTrend)
                }
            }
        }
    }

    /// `lambda_i` for `i = 1..n`.
    pub fn increments(&self, n: usize) -> Result<Vec<f64>> {
        self.validate()?;
        let nf = n as f64;
        Ok(match self {
            TrendSpec::Local { h } => (1..=n).map(|i| h * i as f64 / nf.powf(1.5)).collect(),
            TrendSpec::Tabulated { g } => (1..=n).map(|i| interpolate(g, i as f64 / nf)).collect(),
        })
    }
}

fn interpolate(g: &[f64], x: f64) -> f64 {
    let segments = (g.len() - 1) as f64;
    let pos = (x.clamp(0.0, 1.0) * segments).min(segments);
    let k = (pos.floor() as usize).min(g.len() - 2);
    let w = pos - k as f64;
    g[k] * (1.0 - w) + g[k + 1] * w
}

/// A full simulation request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpSpec {
    #[serde(flatten)]
    pub kind: DgpKind,
    pub n: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trend: Option<TrendSpec>,
}

/// Output of a generator.
#[derive(Debug, Clone, PartialEq)]
pub enum Generated {
    Dataset(Dataset),
    Series(Series),
}

impl Generated {
    pub fn as_dataset(&self) -> Option<&Dataset> {
        match self {
            Generated::Dataset(d) => Some(d),
            Generated::Series(_) => None,
        }
    }

    pub fn as_series(&self) -> Option<&Series> {
        match self {
            Generated::Series(s) => Some(s),
            Generated::Dataset(_) => None,
        }
    }
}

pub fn generate(spec: &DgpSpec) -> Result<Generated> {
    spec.kind.validate()?;
    if spec.trend.is_some() && !spec.kind.produces_series() {
        return Err(Error::InvalidConfig(format!(
            "a trend can only be added to a series design, not {}",
            spec.kind
        )));
    }
    let (n, seed) = (spec.n, spec.seed);
    let out = match spec.kind {
        DgpKind::MdepRegression { m, p } => Generated::Dataset(gen_mdep_regression(m, p, n, seed)?),
        DgpKind::Var2 { rho } => Generated::Dataset(gen_var2(rho, n, seed)?),
        DgpKind::IidGauss { p: Some(p) } => Generated::Dataset(gen_iid_regression(p, n, seed)?),
        DgpKind::Ar1 { rho } => Generated::Series(gen_ar1(rho, n, seed)?),
        DgpKind::MdepSeries { m } => Generated::Series(gen_mdep_series(m, n, seed)?),
        DgpKind::IidGauss { p: None } => Generated::Series(gen_iid_series(n, seed)?),
    };
    match (&spec.trend, out) {
        (Some(trend), Generated::Series(s)) => Ok(Generated::Series(apply_trend(&s, trend)?)),
        (_, out) => Ok(out),
    }
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

fn normals(rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    (0..count).map(|_| normal(rng)).collect()
}

/// Shared factor `T_t`: 1 when `m = 0`, otherwise `xi_t xi_{t+1} ... xi_{t+m}`.
fn product_factor(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<f64> {
    if m == 0 {
        return vec![1.0; n];
    }
    let xi = normals(rng, n + m);
    xi.windows(m + 1).map(|w| w.iter().product()).collect()
}

pub fn gen_mdep_regression(m: usize, p: usize, n: usize, seed: u64) -> Result<Dataset> {
    DgpKind::MdepRegression { m, p }.validate()?;
    let mut rng = rng::stream(seed);
    let t = product_factor(&mut rng, m, n);
    let mut y = Vec::with_capacity(n);
    let mut x = DMatrix::zeros(n, p);
    for (i, &ti) in t.iter().enumerate() {
        for j in 0..p {
            x[(i, j)] = ti * normal(&mut rng);
        }
        y.push(ti * normal(&mut rng));
    }
    Dataset::new(y, x)
}

/// Orthogonal basis used by the VAR(2) design.
pub fn var2_basis() -> Matrix3<f64> {
    let (a, b, c) = (1.0 / 3f64.sqrt(), 1.0 / 2f64.sqrt(), 1.0 / 6f64.sqrt());
    Matrix3::new(a, b, c, a, -b, c, a, 0.0, -2.0 * c)
}

/// `R = Q diag(rho, rho, -rho) Q'`.
pub fn var2_coefficient(rho: f64) -> Matrix3<f64> {
    let q = var2_basis();
    q * Matrix3::from_diagonal(&Vector3::new(rho, rho, -rho)) * q.transpose()
}

pub fn gen_var2(rho: f64, n: usize, seed: u64) -> Result<Dataset> {
    DgpKind::Var2 { rho }.validate()?;
    let r = var2_coefficient(rho);
    let mut rng = rng::stream(seed);
    // R^2 = rho^2 I, so the stationary covariance of each interleaved chain is I / (1 - rho^2).
    let sd = 1.0 / (1.0 - rho * rho).sqrt();
    let mut path: Vec<Vector3<f64>> = Vec::with_capacity(n + 1);
    for t in 0..n + 1 {
        let e = Vector3::new(normal(&mut rng), normal(&mut rng), normal(&mut rng));
        let next = if t < 2 { e * sd } else { r * path[t - 2] + e };
        path.push(next);
    }
    let y: Vec<f64> = (0..n).map(|t| path[t + 1][0]).collect();
    let x = DMatrix::from_fn(n, 3, |t, j| path[t][j]);
    Dataset::new(y, x)
}

fn gen_iid_regression(p: usize, n: usize, seed: u64) -> Result<Dataset> {
    let mut rng = rng::stream(seed);
    let mut y = Vec::with_capacity(n);
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        for j in 0..p {
            x[(i, j)] = normal(&mut rng);
        }
        y.push(normal(&mut rng));
    }
    Dataset::new(y, x)
}

pub fn gen_ar1(rho: f64, n: usize, seed: u64) -> Result<Series> {
    DgpKind::Ar1 { rho }.validate()?;
    let mut rng = rng::stream(seed);
    let mut values = Vec::with_capacity(n);
    if n > 0 {
        values.push(normal(&mut rng) / (1.0 - rho * rho).sqrt());
    }
    for t in 1..n {
        let next = rho * values[t - 1] + normal(&mut rng);
        values.push(next);
    }
    Series::new(values)
}

pub fn gen_mdep_series(m: usize, n: usize, seed: u64) -> Result<Series> {
    let mut rng = rng::stream(seed);
    let z = normals(&mut rng, n + m);
    Series::new(z.windows(m + 1).map(|w| w.iter().product()).collect())
}

fn gen_iid_series(n: usize, seed: u64) -> Result<Series> {
    let mut rng = rng::stream(seed);
    Series::new(normals(&mut rng, n))
}

/// Adds `lambda_i` to each observation.
pub fn apply_trend(series: &Series, trend: &TrendSpec) -> Result<Series> {
    let lambda = trend.increments(series.len())?;
    Series::new(series.values().iter().zip(lambda).map(|(v, l)| v + l).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        assert_eq!(gen_mdep_regression(2, 3, 50, 7).unwrap(), gen_mdep_regression(2, 3, 50, 7).unwrap());
        assert_eq!(gen_var2(0.5, 50, 7).unwrap(), gen_var2(0.5, 50, 7).unwrap());
        assert_eq!(gen_ar1(0.5, 50, 7).unwrap(), gen_ar1(0.5, 50, 7).unwrap());
        assert_ne!(gen_ar1(0.5, 50, 7).unwrap(), gen_ar1(0.5, 50, 8).unwrap());
    }

    #[test]
    fn var2_coefficient_structure() {
        let q = var2_basis();
        assert!((q * q.transpose() - Matrix3::identity()).amax() < 1e-12);
        let r = var2_coefficient(0.8);
        assert!((r - r.transpose()).amax() < 1e-12);
        assert!((r * r - Matrix3::identity() * 0.64).amax() < 1e-12);
        assert!(var2_coefficient(0.0).amax() == 0.0);
    }

    #[test]
    fn response_is_next_first_coordinate() {
        let d = gen_var2(0.3, 20, 1).unwrap();
        for t in 0..19 {
            assert_eq!(d.y()[t], d.x()[(t + 1, 0)]);
        }
    }

    #[test]
    fn mdep_series_product_window() {
        let s = gen_mdep_series(2, 5, 3).unwrap();
        let mut rng = rng::stream(3);
        let z = normals(&mut rng, 7);
        for t in 0..5 {
            assert_eq!(s.values()[t], z[t] * z[t + 1] * z[t + 2]);
        }
        let iid = gen_mdep_series(0, 5, 3).unwrap();
        assert_eq!(iid.values(), &z[..5]);
    }

    #[test]
    fn local_trend_increments() {
        let s = Series::new(vec![0.0; 4]).unwrap();
        let t = apply_trend(&s, &TrendSpec::Local { h: 1.0 }).unwrap();
        assert_eq!(t.values(), &[0.125, 0.25, 0.375, 0.5]);
        let same = apply_trend(&s, &TrendSpec::Local { h: 0.0 }).unwrap();
        assert_eq!(same, s);
    }

    #[test]
    fn tabulated_trends() {
        let s = Series::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let shifted = apply_trend(&s, &TrendSpec::Tabulated { g: vec![2.0, 2.0] }).unwrap();
        assert_eq!(shifted.values(), &[3.0, 4.0, 5.0, 6.0]);
        let ramp = apply_trend(&Series::new(vec![0.0; 4]).unwrap(), &TrendSpec::Tabulated { g: vec![0.0, 1.0, 3.0] }).unwrap();
        assert_eq!(ramp.values(), &[0.5, 1.0, 2.0, 3.0]);
        assert_eq!(
            apply_trend(&s, &TrendSpec::Tabulated { g: vec![0.0, 1.0, 0.5] }).unwrap_err(),
            Error::NonMonotoneTrend
        );
    }

    #[test]
    fn spec_round_trip() {
        let spec = DgpSpec {
            kind: DgpKind::Ar1 { rho: 0.2 },
            n: 100,
            seed: 4,
            trend: Some(TrendSpec::Local { h: 6.0 }),
        };
        let text = serde_json::to_string(&spec).unwrap();
        assert!(text.contains("\"kind\":\"ar1\""));
        assert_eq!(serde_json::from_str::<DgpSpec>(&text).unwrap(), spec);
        let reg: DgpSpec = serde_json::from_str(r#"{"kind":"mdep_regression","m":1,"n":10}"#).unwrap();
        assert_eq!(reg.kind, DgpKind::MdepRegression { m: 1, p: 3 });
    }

    #[test]
    fn invalid_designs() {
        assert_eq!(gen_ar1(1.0, 10, 0).unwrap_err().code(), "INVALID_CONFIG");
        let spec = DgpSpec { kind: DgpKind::Var2 { rho: 0.1 }, n: 10, seed: 0, trend: Some(TrendSpec::Local { h: 1.0 }) };
        assert!(generate(&spec).is_err());
    }
}
