//! Boundary correction `B`: zeros on rows whose stencil window was clamped.

use super::{undivided, DissipationError};

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryCorrection {
    diag: Vec<f64>,
    n_left: usize,
    n_right: usize,
}

impl BoundaryCorrection {
    pub fn from_clamped(clamped: &[bool]) -> Self {
        let n = clamped.len();
        let diag: Vec<f64> = clamped.iter().map(|&c| if c { 0.0 } else { 1.0 }).collect();
        let n_left = clamped.iter().take_while(|&&c| c).count();
        let n_right = if n_left == n {
            0
        } else {
            clamped.iter().rev().take_while(|&&c| c).count()
        };
        BoundaryCorrection {
            diag,
            n_left,
            n_right,
        }
    }

    pub fn identity(n: usize) -> Self {
        BoundaryCorrection {
            diag: vec![1.0; n],
            n_left: 0,
            n_right: 0,
        }
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn n_left_zeros(&self) -> usize {
        self.n_left
    }

    pub fn n_right_zeros(&self) -> usize {
        self.n_right
    }
}

/// `B` for `n` uniform nodes and order `s`.
pub fn build_boundary_correction(n: usize, s: usize) -> Result<BoundaryCorrection, DissipationError> {
    if s == 0 || s + 1 > n {
        return Err(DissipationError::OrderTooHigh { s, n });
    }
    Ok(BoundaryCorrection::from_clamped(&undivided::clamp_pattern(n, s)))
}
