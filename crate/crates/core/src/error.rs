use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Every failure surfaced by the library. The leading upper-case token of each
/// message is the stable error code (see [`Error::code`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DIMENSION_MISMATCH: response has {y_len} entries but covariate matrix has {x_rows} rows")]
    DimensionMismatch { y_len: usize, x_rows: usize },

    #[error("NON_FINITE_VALUE: {location}")]
    NonFiniteValue { location: String },

    #[error("TOO_FEW_ROWS: got {n} rows, need at least {required}")]
    TooFewRows { n: usize, required: usize },

    #[error("SINGULAR_COVARIANCE: {0}")]
    SingularCovariance(String),

    #[error("NOT_SYMMETRIC: asymmetry {asymmetry:e} exceeds tolerance {tolerance:e}")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },

    #[error("BANDWIDTH_TOO_LARGE: bandwidth {bandwidth} must be smaller than n = {n}")]
    BandwidthTooLarge { bandwidth: usize, n: usize },

    #[error("EXHAUSTIVE_TOO_LARGE: exhaustive enumeration supports n <= 8, got n = {n}")]
    ExhaustiveTooLarge { n: usize },

    #[error("INVALID_PERMUTATION: {0}")]
    InvalidPermutation(String),

    #[error("ZERO_VARIANCE: {0}")]
    ZeroVariance(String),

    #[error("NON_MONOTONE_TREND: tabulated trend must be nondecreasing or nonincreasing")]
    NonMonotoneTrend,

    #[error("INVALID_CONFIG: {0}")]
    InvalidConfig(String),

    #[error("EMPTY_INPUT: {0}")]
    EmptyInput(String),

    #[error("permutation #{index}: {source}")]
    AtPermutation { index: usize, source: Box<Error> },

    #[error("cell {cell}, replication {replication}: {source}")]
    AtReplication {
        cell: String,
        replication: usize,
        source: Box<Error>,
    },

    #[error("FILE_NOT_FOUND: {}", .0.display())]
    FileNotFound(PathBuf),

    #[error("PARSE_ERROR at line {line}, column {column}: {message}")]
    Parse {
        line: u64,
        column: String,
        message: String,
    },

    #[error("MISSING_COLUMN: no column named '{0}'")]
    MissingColumn(String),

    #[error("IO_ERROR: {0}")]
    Io(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Usage,
    Data,
    Numerical,
}

impl Error {
    /// The innermost error, with permutation/replication context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPermutation { source, .. } | Error::AtReplication { source, .. } => {
                source.root()
            }
            other => other,
        }
    }

    pub fn code(&self) -> &'static str {
        match self.root() {
            Error::DimensionMismatch { .. } => "DIMENSION_MISMATCH",
            Error::NonFiniteValue { .. } => "NON_FINITE_VALUE",
            Error::TooFewRows { .. } => "TOO_FEW_ROWS",
            Error::SingularCovariance(_) => "SINGULAR_COVARIANCE",
            Error::NotSymmetric { .. } => "NOT_SYMMETRIC",
            Error::BandwidthTooLarge { .. } => "BANDWIDTH_TOO_LARGE",
            Error::ExhaustiveTooLarge { .. } => "EXHAUSTIVE_TOO_LARGE",
            Error::InvalidPermutation(_) => "INVALID_PERMUTATION",
            Error::ZeroVariance(_) => "ZERO_VARIANCE",
            Error::NonMonotoneTrend => "NON_MONOTONE_TREND",
            Error::InvalidConfig(_) => "INVALID_CONFIG",
            Error::EmptyInput(_) => "EMPTY_INPUT",
            Error::FileNotFound(_) => "FILE_NOT_FOUND",
            Error::Parse { .. } => "PARSE_ERROR",
            Error::MissingColumn(_) => "MISSING_COLUMN",
            Error::Io(_) => "IO_ERROR",
            Error::AtPermutation { .. } | Error::AtReplication { .. } => unreachable!(),
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self.root() {
            Error::SingularCovariance(_) | Error::NotSymmetric { .. } | Error::ZeroVariance(_) => {
                ErrorKind::Numerical
            }
            Error::InvalidConfig(_) | Error::ExhaustiveTooLarge { .. } => ErrorKind::Usage,
            _ => ErrorKind::Data,
        }
    }

    pub(crate) fn at_permutation(index: usize, source: Error) -> Self {
        Error::AtPermutation {
            index,
            source: Box::new(source),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn code_looks_through_context() {
        let err = Error::AtReplication {
            cell: "c".into(),
            replication: 3,
            source: Box::new(Error::at_permutation(
                7,
                Error::SingularCovariance("x".into()),
            )),
        };
        assert_eq!(err.code(), "SINGULAR_COVARIANCE");
        assert_eq!(err.kind(), ErrorKind::Numerical);
        assert!(err.to_string().contains("replication 3"));
        assert!(err.to_string().contains("permutation #7"));
    }
}
