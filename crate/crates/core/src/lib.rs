//! Studentized permutation tests for regression coefficients and monotone
//! trend in weakly dependent time series.
//!
//! The crate is organised bottom-up: [`model`] holds validated containers,
//! [`estimators`] the least-squares and long-run variance kernels,
//! [`permutation`] the randomization machinery, [`hypothesis`] the test
//! procedures, [`dgp`] the simulation designs and [`montecarlo`] the
//! rejection-rate harness. [`cli`] wires everything to a command line.

pub mod cli;
pub mod dgp;
pub mod error;
pub mod estimators;
pub mod hypothesis;
pub mod model;
pub mod montecarlo;
pub mod permutation;
pub mod rng;

pub use error::{Error, ErrorKind, Result};
pub use estimators::{
    default_bandwidth, hac_gamma, ols_fit, psd_inverse_sqrt, trend_fit, trend_tau2, LongRunCov,
    OlsFit, TrendFit,
};
pub use hypothesis::{
    classical_wald_test, cross_correlation_perm_test, ljung_box_perm_test, regression_perm_test,
    theoretical_local_power, trend_perm_test, Method, TestOutcome, WaldForm,
};
pub use model::{validate_dataset, Bandwidth, Dataset, Floor, Region, Series, Tail, TestConfig};
pub use permutation::{
    draw_plan, p_value, perm_distribution, permute_covariates, PermDistribution, Permutation,
    PermutationMode, PermutationPlan,
};
