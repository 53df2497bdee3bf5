//! Dense Jacobians by complex step, with a central-difference fallback.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Rhs, RhsError};

const COMPLEX_STEP: f64 = 1e-30;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum JacobianMethod {
    ComplexStep,
    FiniteDifference,
}

fn complex_column(rhs: &dyn Rhs, t: f64, u: &[f64], j: usize) -> Result<Vec<f64>, RhsError> {
    let mut uc: Vec<Complex64> = u.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    uc[j].im = COMPLEX_STEP;
    let mut out = vec![Complex64::new(0.0, 0.0); u.len()];
    rhs.eval_complex(t, &uc, &mut out)?;
    Ok(out.iter().map(|z| z.im / COMPLEX_STEP).collect())
}

fn fd_column(rhs: &dyn Rhs, t: f64, u: &[f64], j: usize) -> Result<Vec<f64>, RhsError> {
    let h = 1e-6 * u[j].abs().max(1.0);
    let mut up = u.to_vec();
    let mut um = u.to_vec();
    up[j] += h;
    um[j] -= h;
    let mut fp = vec![0.0; u.len()];
    let mut fm = vec![0.0; u.len()];
    rhs.eval(t, &up, &mut fp)?;
    rhs.eval(t, &um, &mut fm)?;
    Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
}

/// `dR/du` at `(t, u)`; columns are evaluated in parallel and assembled in
/// order, so the result does not depend on scheduling.
pub fn jacobian(rhs: &dyn Rhs, t: f64, u: &[f64]) -> Result<(DMatrix<f64>, JacobianMethod), RhsError> {
    let n = u.len();
    let method = match complex_column(rhs, t, u, 0) {
        Ok(_) => JacobianMethod::ComplexStep,
        Err(RhsError::NotComplexCapable) => JacobianMethod::FiniteDifference,
        Err(e) => return Err(e),
    };
    let cols: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| match method {
            JacobianMethod::ComplexStep => complex_column(rhs, t, u, j),
            JacobianMethod::FiniteDifference => fd_column(rhs, t, u, j),
        })
        .collect::<Result<_, _>>()?;
    let mut m = DMatrix::zeros(n, n);
    for (j, c) in cols.iter().enumerate() {
        for i in 0..n {
            m[(i, j)] = c[i];
        }
    }
    Ok((m, method))
}
