//! Rejection-rate studies over design x sample size x method grids.
//!
//! Each `(design, n, replication)` triple gets a data seed and a permutation
//! seed derived from the master seed. All methods in a cell see the same
//! simulated data. Replications run in parallel and only integer rejection
//! counts are aggregated, so reports do not depend on the thread count.

mod presets;

use std::collections::HashSet;
use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::dgp::{generate, DgpKind, DgpSpec, Generated, TrendSpec};
use crate::error::{Error, Result};
use crate::hypothesis::{
    classical_wald_test_with, cross_correlation_perm_test, ljung_box_perm_test, regression_perm_test,
    trend_perm_test, Method, TestOutcome, WaldForm,
};
use crate::model::{TestConfig, DEFAULT_ALPHA};
use crate::rng;

pub use presets::{table_spec, TABLE_IDS};

fn default_alpha() -> f64 {
    DEFAULT_ALPHA
}

/// A design in the study grid; `n` and the seed are filled per cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DgpTemplate {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(flatten)]
    pub kind: DgpKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trend: Option<TrendSpec>,
}

impl DgpTemplate {
    pub fn new(kind: DgpKind) -> Self {
        Self {
            id: None,
            kind,
            trend: None,
        }
    }

    pub fn with_trend(mut self, trend: TrendSpec) -> Self {
        self.trend = Some(trend);
        self
    }

    pub fn label(&self) -> String {
        if let Some(id) = &self.id {
            return id.clone();
        }
        match &self.trend {
            None => self.kind.to_string(),
            Some(TrendSpec::Local { h }) => format!("{}+trend(h={h})", self.kind),
            Some(TrendSpec::Tabulated { g }) => format!("{}+trend(g={g:?})", self.kind),
        }
    }

    fn instantiate(&self, n: usize, seed: u64) -> DgpSpec {
        DgpSpec {
            kind: self.kind.clone(),
            n,
            seed,
            trend: self.trend.clone(),
        }
    }
}

/// A test procedure applied in every cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSpec {
    pub method: Method,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(default)]
    pub config: TestConfig,
    /// Lag count (Ljung-Box, first entry) or lag list (cross-correlation).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lags: Vec<usize>,
    #[serde(default)]
    pub wald_form: WaldForm,
}

impl MethodSpec {
    pub fn new(method: Method) -> Self {
        Self {
            method,
            id: None,
            config: TestConfig::default(),
            lags: Vec::new(),
            wald_form: WaldForm::Standard,
        }
    }

    pub fn with_config(mut self, config: TestConfig) -> Self {
        self.config = config;
        self
    }

    pub fn with_lags(mut self, lags: Vec<usize>) -> Self {
        self.lags = lags;
        self
    }

    pub fn label(&self) -> String {
        self.id.clone().unwrap_or_else(|| self.method.name().to_string())
    }

    fn effective_config(&self, alpha: f64, seed: u64) -> TestConfig {
        let studentize = match self.method {
            Method::PermRegUnstud | Method::PermTrendUnstud => false,
            Method::PermRegStud | Method::PermTrendStud => true,
            _ => self.config.studentize,
        };
        TestConfig {
            alpha,
            seed,
            studentize,
            ..self.config.clone()
        }
    }

    /// Runs the method on one simulated data set.
    pub fn run(&self, data: &Generated, alpha: f64, perm_seed: u64) -> Result<TestOutcome> {
        let cfg = self.effective_config(alpha, perm_seed);
        let mismatch = || {
            Error::InvalidConfig(format!(
                "method {} cannot be applied to this design",
                self.method
            ))
        };
        match self.method {
            Method::PermRegStud | Method::PermRegUnstud => {
                regression_perm_test(data.as_dataset().ok_or_else(mismatch)?, &cfg)
            }
            Method::ClassicalWald => {
                classical_wald_test_with(data.as_dataset().ok_or_else(mismatch)?, alpha, self.wald_form)
            }
            Method::PermCrossCorr => {
                let lags = if self.lags.is_empty() { vec![0] } else { self.lags.clone() };
                cross_correlation_perm_test(data.as_dataset().ok_or_else(mismatch)?, &lags, &cfg)
            }
            Method::PermTrendStud | Method::PermTrendUnstud => {
                trend_perm_test(data.as_series().ok_or_else(mismatch)?, &cfg)
            }
            Method::PermLjungBox => {
                let lags = self.lags.first().copied().unwrap_or(1);
                ljung_box_perm_test(data.as_series().ok_or_else(mismatch)?, lags, &cfg)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dgps: Vec<DgpTemplate>,
    pub n_grid: Vec<usize>,
    pub methods: Vec<MethodSpec>,
    pub replications: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

impl StudySpec {
    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::InvalidConfig("replications must be at least 1".into()));
        }
        if self.dgps.is_empty() || self.n_grid.is_empty() || self.methods.is_empty() {
            return Err(Error::InvalidConfig(
                "design, sample-size and method grids must be nonempty".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidConfig(format!("alpha must lie in (0, 1), got {}", self.alpha)));
        }
        for dgp in &self.dgps {
            dgp.kind.validate()?;
            if let Some(t) = &dgp.trend {
                t.validate()?;
            }
            for m in &self.methods {
                m.effective_config(self.alpha, 0).validate()?;
                if m.method.takes_series() != dgp.kind.produces_series() {
                    return Err(Error::InvalidConfig(format!(
                        "method {} is incompatible with design {}",
                        m.label(),
                        dgp.label()
                    )));
                }
            }
        }
        let labels: HashSet<String> = self.dgps.iter().map(DgpTemplate::label).collect();
        if labels.len() != self.dgps.len() {
            return Err(Error::InvalidConfig("design labels must be unique".into()));
        }
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON encoding.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("study spec serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }
}

/// One `(design, n, method)` cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McCell {
    pub dgp: String,
    pub n: usize,
    pub method: String,
    pub rejection_rate: f64,
    pub mc_se: f64,
    pub rejections: usize,
    pub replications: usize,
    /// Summed wall-clock time spent in this method across replications.
    pub elapsed_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McReport {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub master_seed: u64,
    pub spec_hash: String,
    pub cells: Vec<McCell>,
}

impl McReport {
    pub fn cell(&self, dgp: &str, n: usize, method: &str) -> Option<&McCell> {
        self.cells.iter().find(|c| c.dgp == dgp && c.n == n && c.method == method)
    }

    /// Copy with every timing field zeroed, for reproducibility comparisons.
    pub fn without_timing(&self) -> Self {
        let mut out = self.clone();
        out.cells.iter_mut().for_each(|c| c.elapsed_secs = 0.0);
        out
    }

    /// One CSV row per cell.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        for cell in &self.cells {
            w.serialize(cell).map_err(|e| Error::Io(e.to_string()))?;
        }
        w.flush().map_err(|e| Error::Io(e.to_string()))
    }
}

/// `(rate, sqrt(rate (1 - rate) / R))`.
pub fn summarize(outcomes: &[bool]) -> Result<(f64, f64)> {
    if outcomes.is_empty() {
        return Err(Error::EmptyInput("no replication outcomes".into()));
    }
    Ok(rate_and_se(outcomes.iter().filter(|&&b| b).count(), outcomes.len()))
}

fn rate_and_se(hits: usize, total: usize) -> (f64, f64) {
    let rate = hits as f64 / total as f64;
    (rate, (rate * (1.0 - rate) / total as f64).sqrt())
}

struct Seeds {
    data: u64,
    perm: u64,
}

fn seeds(master: u64, dgp: &DgpTemplate, n: usize, rep: usize) -> Seeds {
    let tag = rng::label(&dgp.label());
    Seeds {
        data: rng::derive(master, &[tag, n as u64, rep as u64, rng::DATA]),
        perm: rng::derive(master, &[tag, n as u64, rep as u64, rng::PERM]),
    }
}

fn check_collisions(spec: &StudySpec) -> Result<()> {
    let mut seen = HashSet::new();
    for dgp in &spec.dgps {
        for &n in &spec.n_grid {
            for rep in 0..spec.replications {
                let s = seeds(spec.master_seed, dgp, n, rep);
                if !seen.insert(s.data) || !seen.insert(s.perm) {
                    return Err(Error::InvalidConfig(format!(
                        "seed collision at design {}, n = {n}, replication {rep}; choose another master seed",
                        dgp.label()
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Runs every cell of the study on the current rayon pool.
pub fn run_study(spec: &StudySpec) -> Result<McReport> {
    spec.validate()?;
    check_collisions(spec)?;
    let mut cells = Vec::new();
    for dgp in &spec.dgps {
        for &n in &spec.n_grid {
            let cell_id = format!("{} / n={n}", dgp.label());
            let per_rep: Vec<Vec<(bool, f64)>> = (0..spec.replications)
                .into_par_iter()
                .map(|rep| {
                    let s = seeds(spec.master_seed, dgp, n, rep);
                    let context = |e: Error| Error::AtReplication {
                        cell: cell_id.clone(),
                        replication: rep,
                        source: Box::new(e),
                    };
                    let data = generate(&dgp.instantiate(n, s.data)).map_err(context)?;
                    spec.methods
                        .iter()
                        .map(|m| {
                            let start = Instant::now();
                            let out = m.run(&data, spec.alpha, s.perm).map_err(context)?;
                            Ok((out.reject, start.elapsed().as_secs_f64()))
                        })
                        .collect()
                })
                .collect::<Result<_>>()?;
            for (k, method) in spec.methods.iter().enumerate() {
                let hits = per_rep.iter().filter(|r| r[k].0).count();
                let elapsed = per_rep.iter().map(|r| r[k].1).sum();
                let (rate, se) = rate_and_se(hits, spec.replications);
                cells.push(McCell {
                    dgp: dgp.label(),
                    n,
                    method: method.label(),
                    rejection_rate: rate,
                    mc_se: se,
                    rejections: hits,
                    replications: spec.replications,
                    elapsed_secs: elapsed,
                });
            }
        }
    }
    Ok(McReport {
        name: spec.name.clone(),
        master_seed: spec.master_seed,
        spec_hash: spec.hash(),
        cells,
    })
}

/// As [`run_study`] with at most `threads` workers.
pub fn run_study_with_threads(spec: &StudySpec, threads: Option<usize>) -> Result<McReport> {
    match threads {
        None => run_study(spec),
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t.max(1))
            .build()
            .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?
            .install(|| run_study(spec)),
    }
}
