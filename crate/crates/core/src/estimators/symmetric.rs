//! Symmetric-matrix helpers built on a floored eigendecomposition.
//!
//! Inverses and inverse square roots of variance estimates all go through
//! [`FlooredEigen`], so a floored matrix is never inverted any other way.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-8;

/// Fails with `NOT_SYMMETRIC` when `max |m_ij - m_ji|` exceeds `1e-8 * max(1, max |m_ij|)`.
pub fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if !m.is_square() {
        return Err(Error::InvalidConfig(format!(
            "expected a square matrix, got {}x{}",
            m.nrows(),
            m.ncols()
        )));
    }
    let scale = m.amax().max(1.0);
    let mut gap = 0.0f64;
    for i in 0..m.nrows() {
        for j in 0..i {
            gap = gap.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    let tolerance = SYMMETRY_TOL * scale;
    if gap > tolerance || gap.is_nan() {
        return Err(Error::NotSymmetric {
            asymmetry: gap,
            tolerance,
        });
    }
    Ok(())
}

/// Eigendecomposition with eigenvalues raised to a floor.
#[derive(Debug, Clone)]
pub struct FlooredEigen {
    pub values: DVector<f64>,
    pub vectors: DMatrix<f64>,
    /// Whether any eigenvalue was raised.
    pub floored: bool,
}

impl FlooredEigen {
    /// Decomposes a symmetric matrix. With `floor = None` every eigenvalue must
    /// be strictly positive, otherwise `SINGULAR_COVARIANCE` is returned.
    pub fn new(m: &DMatrix<f64>, floor: Option<f64>) -> Result<Self> {
        let eig = SymmetricEigen::new(m.clone());
        let mut values = eig.eigenvalues;
        let mut floored = false;
        match floor {
            Some(eps) => {
                for v in values.iter_mut() {
                    if *v < eps || v.is_nan() {
                        *v = eps;
                        floored = true;
                    }
                }
            }
            None => {
                if let Some(v) = values.iter().find(|v| !(**v > 0.0)) {
                    return Err(Error::SingularCovariance(format!(
                        "long-run covariance has eigenvalue {v:e} and flooring is off"
                    )));
                }
            }
        }
        Ok(Self {
            values,
            vectors: eig.eigenvectors,
            floored,
        })
    }

    fn rebuild(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let scaled = DVector::from_iterator(self.values.len(), self.values.iter().map(|&v| f(v)));
        let u = &self.vectors;
        let m = u * DMatrix::from_diagonal(&scaled) * u.transpose();
        (&m + m.transpose()) * 0.5
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        self.rebuild(|v| v)
    }

    pub fn inverse(&self) -> DMatrix<f64> {
        self.rebuild(|v| 1.0 / v)
    }

    pub fn inverse_sqrt(&self) -> DMatrix<f64> {
        self.rebuild(|v| 1.0 / v.sqrt())
    }

    /// `s' M^-1 s`.
    pub fn inverse_quadratic(&self, s: &[f64]) -> f64 {
        let mut total = 0.0;
        for (k, &lambda) in self.values.iter().enumerate() {
            let proj: f64 = self.vectors.column(k).iter().zip(s).map(|(a, b)| a * b).sum();
            total += proj * proj / lambda;
        }
        total
    }

    /// `max_j |(M^-1/2 s)_j|`.
    pub fn whitened_max(&self, s: &[f64]) -> f64 {
        let p = s.len();
        let mut coef = vec![0.0; p];
        for (k, &lambda) in self.values.iter().enumerate() {
            let col = self.vectors.column(k);
            let proj: f64 = col.iter().zip(s).map(|(a, b)| a * b).sum::<f64>() / lambda.sqrt();
            for j in 0..p {
                coef[j] += col[j] * proj;
            }
        }
        coef.iter().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Symmetric matrix with eigenvalues raised to `floor`, plus whether any was raised.
pub fn floor_eigenvalues(m: &DMatrix<f64>, floor: f64) -> Result<(DMatrix<f64>, bool)> {
    check_symmetric(m)?;
    let sym = (m + m.transpose()) * 0.5;
    let eig = FlooredEigen::new(&sym, Some(floor))?;
    Ok((eig.matrix(), eig.floored))
}

/// `U diag(max(λ, floor)^-1/2) U'` for a symmetric `m = U diag(λ) U'`.
pub fn psd_inverse_sqrt(m: &DMatrix<f64>, floor: f64) -> Result<DMatrix<f64>> {
    if !(floor > 0.0) {
        return Err(Error::InvalidConfig(format!("floor must be positive, got {floor}")));
    }
    check_symmetric(m)?;
    let sym = (m + m.transpose()) * 0.5;
    Ok(FlooredEigen::new(&sym, Some(floor))?.inverse_sqrt())
}
