//! Study grids for the four built-in rejection-rate tables.

use crate::dgp::DgpKind;
use crate::error::{Error, Result};
use crate::hypothesis::Method;
use crate::model::{TestConfig, DEFAULT_PERMUTATIONS};

use super::{DgpTemplate, MethodSpec, StudySpec};

pub const TABLE_IDS: [u8; 4] = [1, 2, 3, 4];

const REGRESSION_N: [usize; 5] = [50, 100, 500, 1000, 10_000];
const TREND_N: [usize; 5] = [20, 50, 100, 500, 1000];
const FULL_REPLICATIONS: f64 = 1000.0;

/// Study for table `table`. `scale` multiplies the replication count (at least
/// one) and drops sample sizes above `max(1000, 10000 * scale)`.
pub fn table_spec(table: u8, scale: f64, permutations: Option<usize>, master_seed: u64) -> Result<StudySpec> {
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(Error::InvalidConfig(format!("scale must be positive, got {scale}")));
    }
    let config = TestConfig {
        permutations: permutations.unwrap_or(DEFAULT_PERMUTATIONS),
        ..TestConfig::default()
    };
    let (kinds, n_all, methods): (Vec<DgpKind>, &[usize], [Method; 2]) = match table {
        1 => (
            (0..4).map(|m| DgpKind::MdepRegression { m, p: 3 }).collect(),
            &REGRESSION_N,
            [Method::PermRegStud, Method::ClassicalWald],
        ),
        2 => (
            [-0.8, -0.5, 0.5, 0.8].iter().map(|&rho| DgpKind::Var2 { rho }).collect(),
            &REGRESSION_N,
            [Method::PermRegStud, Method::ClassicalWald],
        ),
        3 => (
            (0..4).map(|m| DgpKind::MdepSeries { m }).collect(),
            &TREND_N,
            [Method::PermTrendStud, Method::PermTrendUnstud],
        ),
        4 => (
            [-0.6, -0.2, 0.2, 0.6].iter().map(|&rho| DgpKind::Ar1 { rho }).collect(),
            &TREND_N,
            [Method::PermTrendStud, Method::PermTrendUnstud],
        ),
        other => return Err(Error::InvalidConfig(format!("unknown table {other}; expected 1-4"))),
    };
    let cap = (10_000.0 * scale).max(1000.0);
    Ok(StudySpec {
        name: Some(format!("table {table}")),
        dgps: kinds.into_iter().map(DgpTemplate::new).collect(),
        n_grid: n_all.iter().copied().filter(|&n| n as f64 <= cap).collect(),
        methods: methods
            .into_iter()
            .map(|m| MethodSpec::new(m).with_config(config.clone()))
            .collect(),
        replications: ((FULL_REPLICATIONS * scale).round() as usize).max(1),
        master_seed,
        alpha: 0.05,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_scale_truncates_large_n() {
        let spec = table_spec(1, 0.1, None, 0).unwrap();
        assert_eq!(spec.n_grid, vec![50, 100, 500, 1000]);
        assert_eq!(spec.replications, 100);
        assert_eq!(spec.methods[0].config.permutations, 2000);
        let full = table_spec(2, 1.0, Some(500), 0).unwrap();
        assert_eq!(full.n_grid.len(), 5);
        assert_eq!(full.replications, 1000);
        assert!(table_spec(5, 1.0, None, 0).is_err());
        assert_eq!(table_spec(3, 0.0001, None, 0).unwrap().replications, 1);
    }
}
