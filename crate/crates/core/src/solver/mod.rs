//! Time integration, Jacobians, spectra and convergence-rate fits.

mod convergence;
mod eigen;
mod integrate;
mod jacobian;

use num_complex::Complex64;
use thiserror::Error;

use crate::semidisc::SemidiscError;

pub use convergence::{fit_rate, h_norm_error, run_convergence, ConvergenceReport};
pub use eigen::{eigenvalues, spectrum, EigenError, SpectrumReport};
pub use integrate::{integrate, CrashCause, CrashInfo, Method, TimeIntegrator, Trajectory};
pub use jacobian::{jacobian, JacobianMethod};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RhsError {
    #[error("non-admissible state: {0}")]
    NonAdmissibleState(String),
    #[error("right-hand side cannot be evaluated on complex states")]
    NotComplexCapable,
    #[error("{0}")]
    Other(String),
}

impl From<SemidiscError> for RhsError {
    fn from(e: SemidiscError) -> Self {
        match e {
            SemidiscError::NonAdmissibleState { .. } => RhsError::NonAdmissibleState(e.to_string()),
            other => RhsError::Other(other.to_string()),
        }
    }
}

/// A semi-discrete system `du/dt = R(t, u)`.
pub trait Rhs: Sync {
    fn dim(&self) -> usize;

    fn eval(&self, t: f64, u: &[f64], out: &mut [f64]) -> Result<(), RhsError>;

    /// Evaluation on complex states for complex-step differentiation.
    fn eval_complex(&self, _t: f64, _u: &[Complex64], _out: &mut [Complex64]) -> Result<(), RhsError> {
        Err(RhsError::NotComplexCapable)
    }

    /// Admissibility of an accepted state.
    fn check_state(&self, _u: &[f64]) -> Result<(), RhsError> {
        Ok(())
    }

    /// Explicit step bound used with a CFL number.
    fn stable_dt(&self, _u: &[f64]) -> Option<f64> {
        None
    }
}

/// Closure-backed system, handy for scalar tests.
pub struct FnRhs<F, G = fn(f64, &[Complex64], &mut [Complex64])> {
    pub dim: usize,
    pub f: F,
    pub fc: Option<G>,
}

impl<F> FnRhs<F>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
{
    pub fn new(dim: usize, f: F) -> Self {
        FnRhs { dim, f, fc: None }
    }
}

impl<F, G> FnRhs<F, G>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
    G: Fn(f64, &[Complex64], &mut [Complex64]) + Sync,
{
    pub fn with_complex(dim: usize, f: F, fc: G) -> Self {
        FnRhs { dim, f, fc: Some(fc) }
    }
}

impl<F, G> Rhs for FnRhs<F, G>
where
    F: Fn(f64, &[f64], &mut [f64]) + Sync,
    G: Fn(f64, &[Complex64], &mut [Complex64]) + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, t: f64, u: &[f64], out: &mut [f64]) -> Result<(), RhsError> {
        (self.f)(t, u, out);
        Ok(())
    }

    fn eval_complex(&self, t: f64, u: &[Complex64], out: &mut [Complex64]) -> Result<(), RhsError> {
        match &self.fc {
            Some(g) => {
                g(t, u, out);
                Ok(())
            }
            None => Err(RhsError::NotComplexCapable),
        }
    }
}
