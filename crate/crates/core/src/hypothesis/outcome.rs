use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Method {
    PermRegStud,
    PermRegUnstud,
    ClassicalWald,
    PermTrendStud,
    PermTrendUnstud,
    PermLjungBox,
    PermCrossCorr,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::PermRegStud,
        Method::PermRegUnstud,
        Method::ClassicalWald,
        Method::PermTrendStud,
        Method::PermTrendUnstud,
        Method::PermLjungBox,
        Method::PermCrossCorr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::PermRegStud => "PERM_REG_STUD",
            Method::PermRegUnstud => "PERM_REG_UNSTUD",
            Method::ClassicalWald => "CLASSICAL_WALD",
            Method::PermTrendStud => "PERM_TREND_STUD",
            Method::PermTrendUnstud => "PERM_TREND_UNSTUD",
            Method::PermLjungBox => "PERM_LJUNG_BOX",
            Method::PermCrossCorr => "PERM_CROSS_CORR",
        }
    }

    /// Whether the method consumes a univariate series rather than a dataset.
    pub fn takes_series(self) -> bool {
        matches!(
            self,
            Method::PermTrendStud | Method::PermTrendUnstud | Method::PermLjungBox
        )
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Result of a single test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    pub reject: bool,
    pub alpha: f64,
    pub n: usize,
    pub p: usize,
    pub bandwidth_used: Option<usize>,
    /// Whether the variance floor bound on the observed data.
    pub floored: bool,
    /// Number of permutation samples the p-value is based on (0 for asymptotic tests).
    pub permutations: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perm_samples: Option<Vec<f64>>,
}
