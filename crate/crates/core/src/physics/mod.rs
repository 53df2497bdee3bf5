//! PDE definitions: fluxes, wave speeds, entropy maps and two-point fluxes.

mod burgers;
mod euler;
pub(crate) mod two_point;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use burgers::burgers_flux_split;
pub use euler::{euler_flux_and_jacobian, Euler, EulerEigen, FluxJacobian, Primitive};
pub use two_point::{chandrashekar_flux, log_mean, ranocha_flux_2d};

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum PhysicsError {
    #[error("non-admissible state: density {rho}, pressure {p}")]
    NonAdmissibleState { rho: f64, p: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    X,
    Y,
}

impl Direction {
    pub fn index(self) -> usize {
        match self {
            Direction::X => 0,
            Direction::Y => 1,
        }
    }

    /// Unit normal `(n_x, n_y)`.
    pub fn normal(self) -> (f64, f64) {
        match self {
            Direction::X => (1.0, 0.0),
            Direction::Y => (0.0, 1.0),
        }
    }
}
