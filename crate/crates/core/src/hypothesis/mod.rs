//! Hypothesis-testing procedures built on the permutation machinery.

mod classical;
mod lagged;
mod outcome;
mod power;
mod regression;
mod trend;

pub use classical::{chi_square_critical, classical_wald_test, classical_wald_test_with, WaldForm};
pub use lagged::{cross_correlation_design, cross_correlation_perm_test, ljung_box_design, ljung_box_perm_test, lag_moments};
pub use outcome::{Method, TestOutcome};
pub use power::{local_power, theoretical_local_power};
pub use regression::{regression_perm_test, RegressionKernel};
pub use trend::{trend_perm_test, TrendKernel};
