//! Volume dissipation for summation-by-parts discretizations.
//!
//! The crate is organised bottom-up:
//!
//! * [`operators`] builds nodal distributions and diagonal-norm SBP
//!   first-derivative operators (classical FD, LGL and LG spectral elements)
//!   plus the fixed five-node upwind pair.
//! * [`dissipation`] builds undivided differences, the boundary correction and
//!   the assembled dissipation operator `A_D = -eps H^-1 Dt^T C Dt`.
//! * [`physics`] holds fluxes, entropy maps and two-point fluxes.
//! * [`semidisc`] assembles periodic right-hand sides in 1D and 2D.
//! * [`solver`] provides time integration, Jacobians, spectra and rate fits.
//! * [`problems`] collects the initial conditions of the reference experiments.
//!
//! All residual paths are generic over [`Scalar`] so that the complex-step
//! Jacobian can reuse them.

pub mod dissipation;
pub mod operators;
pub mod physics;
pub mod problems;
pub mod scalar;
pub mod semidisc;
pub mod solver;

pub use scalar::Scalar;
