//! Dense nonsymmetric eigenvalues via a real Schur decomposition.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{jacobian, JacobianMethod, Rhs, RhsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("eigenvalue iteration did not converge")]
    NoConvergence,
    #[error("matrix is not square ({0}x{1})")]
    NotSquare(usize, usize),
    #[error(transparent)]
    Rhs(#[from] RhsError),
}

/// All eigenvalues of a real square matrix, sorted by real then imaginary part.
pub fn eigenvalues(m: &DMatrix<f64>) -> Result<Vec<Complex64>, EigenError> {
    if m.nrows() != m.ncols() {
        return Err(EigenError::NotSquare(m.nrows(), m.ncols()));
    }
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let n = m.nrows();
    let iters = 200 * n.max(10);
    let mut a = m.clone();
    let mut schur = None;
    // Shifted QR can stall on highly structured input such as a cyclic
    // shift. A Householder similarity keeps the spectrum and breaks the
    // structure; retry with a few fixed reflections.
    for k in 0..4 {
        if k > 0 {
            let v = DVector::from_fn(n, |i, _| ((i + 1) as f64 * (k as f64 + 0.618)).sin() + 0.1);
            let q = DMatrix::identity(n, n) - &v * v.transpose() * (2.0 / v.norm_squared());
            a = &q * m * &q;
        }
        schur = nalgebra::linalg::Schur::try_new(a.clone(), f64::EPSILON, iters);
        if schur.is_some() {
            break;
        }
    }
    let schur = schur.ok_or(EigenError::NoConvergence)?;
    let mut ev: Vec<Complex64> = schur.complex_eigenvalues().iter().cloned().collect();
    ev.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
    Ok(ev)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub eigenvalues: Vec<Complex64>,
    pub max_real_part: f64,
    pub spectral_radius: f64,
    pub method: JacobianMethod,
}

impl SpectrumReport {
    pub fn from_eigenvalues(eigenvalues: Vec<Complex64>, method: JacobianMethod) -> Self {
        let max_real_part = eigenvalues.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let spectral_radius = eigenvalues.iter().map(|z| z.norm()).fold(0.0, f64::max);
        SpectrumReport {
            eigenvalues,
            max_real_part,
            spectral_radius,
            method,
        }
    }
}

/// Spectrum of the Jacobian of `rhs` at `u`.
pub fn spectrum(rhs: &dyn Rhs, t: f64, u: &[f64]) -> Result<SpectrumReport, EigenError> {
    let (j, method) = jacobian(rhs, t, u)?;
    Ok(SpectrumReport::from_eigenvalues(eigenvalues(&j)?, method))
}
