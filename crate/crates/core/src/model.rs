//! Validated data containers and test configuration.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::permutation::PermutationMode;

/// Number of resampled permutations used when none is given.
pub const DEFAULT_PERMUTATIONS: usize = 2000;
pub const DEFAULT_ALPHA: f64 = 0.05;
/// Eigenvalue floor for the regression long-run covariance.
pub const REGRESSION_FLOOR: f64 = 1e-4;
/// Floor for the trend long-run variance.
pub const TREND_FLOOR: f64 = 1e-6;

/// Response vector paired with an `n x p` covariate matrix (row `i` is `X_i`).
///
/// Always satisfies `p >= 1`, `n > p + 2` and has only finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    y: DVector<f64>,
    x: DMatrix<f64>,
}

impl Dataset {
    pub fn new(y: Vec<f64>, x: DMatrix<f64>) -> Result<Self> {
        if y.len() != x.nrows() {
            return Err(Error::DimensionMismatch {
                y_len: y.len(),
                x_rows: x.nrows(),
            });
        }
        if x.ncols() == 0 {
            return Err(Error::InvalidConfig(
                "covariate matrix must have at least one column".into(),
            ));
        }
        if let Some(i) = y.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                location: format!("response row {}", i + 1),
            });
        }
        for j in 0..x.ncols() {
            if let Some(i) = x.column(j).iter().position(|v| !v.is_finite()) {
                return Err(Error::NonFiniteValue {
                    location: format!("covariate row {}, column {}", i + 1, j + 1),
                });
            }
        }
        let required = x.ncols() + 3;
        if y.len() < required {
            return Err(Error::TooFewRows {
                n: y.len(),
                required,
            });
        }
        Ok(Self {
            y: DVector::from_vec(y),
            x,
        })
    }

    /// Builds a dataset from covariate rows.
    pub fn from_rows(y: Vec<f64>, rows: &[Vec<f64>]) -> Result<Self> {
        let p = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != p) {
            return Err(Error::InvalidConfig(format!(
                "covariate row {} has {} entries, expected {p}",
                bad + 1,
                rows[bad].len()
            )));
        }
        let x = DMatrix::from_fn(rows.len(), p, |i, j| rows[i][j]);
        Self::new(y, x)
    }

    /// Skips validation; callers guarantee the invariants already hold.
    pub(crate) fn from_parts_unchecked(y: DVector<f64>, x: DMatrix<f64>) -> Self {
        debug_assert_eq!(y.len(), x.nrows());
        Self { y, x }
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn y(&self) -> &DVector<f64> {
        &self.y
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }
}

/// Shape and finiteness check for a response/covariate pair.
pub fn validate_dataset(y: Vec<f64>, x: DMatrix<f64>) -> Result<Dataset> {
    Dataset::new(y, x)
}

/// A univariate series of at least three finite observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
}

impl Series {
    pub const MIN_LEN: usize = 3;

    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                location: format!("series position {}", i + 1),
            });
        }
        if values.len() < Self::MIN_LEN {
            return Err(Error::TooFewRows {
                n: values.len(),
                required: Self::MIN_LEN,
            });
        }
        Ok(Self { values })
    }

    pub(crate) fn from_vec_unchecked(values: Vec<f64>) -> Self {
        Self { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.len() as f64
    }

    /// Biased (1/n) sample variance.
    pub fn variance(&self) -> f64 {
        let mean = self.mean();
        self.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / self.len() as f64
    }
}

/// Number of lags in the long-run variance estimators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Bandwidth {
    /// `floor(n^(1/3)) + 1`.
    #[default]
    Auto,
    Fixed(usize),
}

impl Bandwidth {
    pub fn resolve(self, n: usize) -> Result<usize> {
        let b = match self {
            Bandwidth::Auto => crate::estimators::default_bandwidth(n),
            Bandwidth::Fixed(b) => b,
        };
        if b == 0 {
            return Err(Error::InvalidConfig("bandwidth must be positive".into()));
        }
        if b >= n {
            return Err(Error::BandwidthTooLarge { bandwidth: b, n });
        }
        Ok(b)
    }
}

impl fmt::Display for Bandwidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bandwidth::Auto => f.write_str("auto"),
            Bandwidth::Fixed(b) => write!(f, "{b}"),
        }
    }
}

impl FromStr for Bandwidth {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(Bandwidth::Auto);
        }
        s.parse::<usize>()
            .map(Bandwidth::Fixed)
            .map_err(|_| Error::InvalidConfig(format!("bandwidth must be 'auto' or a positive integer, got '{s}'")))
    }
}

/// Eigenvalue floor applied to long-run variance estimates.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Floor {
    /// Procedure default: [`REGRESSION_FLOOR`] or [`TREND_FLOOR`].
    #[default]
    Auto,
    Fixed(f64),
    /// No flooring; a non-positive eigenvalue becomes a numerical error.
    Off,
}

impl Floor {
    pub fn resolve(self, default: f64) -> Option<f64> {
        match self {
            Floor::Auto => Some(default),
            Floor::Fixed(e) => Some(e),
            Floor::Off => None,
        }
    }
}

impl fmt::Display for Floor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Floor::Auto => f.write_str("auto"),
            Floor::Off => f.write_str("off"),
            Floor::Fixed(e) => write!(f, "{e}"),
        }
    }
}

impl FromStr for Floor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "auto" => Ok(Floor::Auto),
            "off" | "none" => Ok(Floor::Off),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|e| e.is_finite() && *e > 0.0)
                .map(Floor::Fixed)
                .ok_or_else(|| Error::InvalidConfig(format!("floor must be 'auto', 'off' or a positive number, got '{s}'"))),
        }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NumberOrWord {
    Number(f64),
    Word(String),
}

impl Serialize for Bandwidth {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Bandwidth::Auto => s.serialize_str("auto"),
            Bandwidth::Fixed(b) => s.serialize_u64(*b as u64),
        }
    }
}

impl<'de> Deserialize<'de> for Bandwidth {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match NumberOrWord::deserialize(d)? {
            NumberOrWord::Number(v) if v >= 1.0 && v.fract() == 0.0 => Ok(Bandwidth::Fixed(v as usize)),
            NumberOrWord::Number(v) => Err(serde::de::Error::custom(format!("invalid bandwidth {v}"))),
            NumberOrWord::Word(w) => w.parse().map_err(serde::de::Error::custom),
        }
    }
}

impl Serialize for Floor {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Floor::Auto => s.serialize_str("auto"),
            Floor::Off => s.serialize_str("off"),
            Floor::Fixed(e) => s.serialize_f64(*e),
        }
    }
}

impl<'de> Deserialize<'de> for Floor {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match NumberOrWord::deserialize(d)? {
            NumberOrWord::Number(v) if v > 0.0 && v.is_finite() => Ok(Floor::Fixed(v)),
            NumberOrWord::Number(v) => Err(serde::de::Error::custom(format!("invalid floor {v}"))),
            NumberOrWord::Word(w) => w.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Acceptance region shape for the multivariate regression statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// Quadratic form `n b' Sx G^-1 Sx b`.
    #[default]
    Sphere,
    /// Max-coordinate statistic `max_j |(G^-1/2 Sx sqrt(n) b)_j|`.
    Box,
}

/// Rejection tail for scalar statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tail {
    #[default]
    Upper,
    TwoSided,
}

/// Options shared by every permutation procedure.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TestConfig {
    pub alpha: f64,
    pub permutations: usize,
    pub seed: u64,
    pub bandwidth: Bandwidth,
    pub floor: Floor,
    pub region: Region,
    pub studentize: bool,
    pub tail: Tail,
    pub mode: PermutationMode,
    pub include_identity: bool,
    /// Retain the permutation samples in the outcome.
    pub keep_samples: bool,
}

impl Default for TestConfig {
    fn default() -> Self {
        Self {
            alpha: DEFAULT_ALPHA,
            permutations: DEFAULT_PERMUTATIONS,
            seed: 0,
            bandwidth: Bandwidth::Auto,
            floor: Floor::Auto,
            region: Region::Sphere,
            studentize: true,
            tail: Tail::Upper,
            mode: PermutationMode::Sampled,
            include_identity: true,
            keep_samples: false,
        }
    }
}

impl TestConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if self.permutations == 0 {
            return Err(Error::InvalidConfig("permutations must be at least 1".into()));
        }
        if let Floor::Fixed(e) = self.floor {
            if !(e.is_finite() && e > 0.0) {
                return Err(Error::InvalidConfig(format!("floor must be positive, got {e}")));
            }
        }
        if let Bandwidth::Fixed(0) = self.bandwidth {
            return Err(Error::InvalidConfig("bandwidth must be positive".into()));
        }
        Ok(())
    }
}
