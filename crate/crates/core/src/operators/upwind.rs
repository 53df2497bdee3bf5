//! The five-node upwind SBP pair with interior accuracy two.

use nalgebra::{DMatrix, SymmetricEigen};

/// Upwind pair `D+`, `D-` on a block of length `length`.
#[derive(Debug, Clone)]
pub struct UpwindOperator {
    length: f64,
    h: Vec<f64>,
    d_plus: DMatrix<f64>,
    d_minus: DMatrix<f64>,
}

const D_PLUS: [[f64; 5]; 5] = [
    [-12.0, 20.0, -8.0, 0.0, 0.0],
    [-0.8, -4.0, 6.4, -1.6, 0.0],
    [0.0, 0.0, -6.0, 8.0, -2.0],
    [0.0, 0.0, 0.0, -4.0, 4.0],
    [0.0, 0.0, 0.0, -4.0, 4.0],
];

/// The fixed instance on `[0, 1]` with spacing 1/4.
pub fn build_upwind_pu2_block() -> UpwindOperator {
    let n = 5;
    let d_plus = DMatrix::from_fn(n, n, |i, j| D_PLUS[i][j]);
    // Reflection through the block centre: D- = -J D+ J.
    let d_minus = DMatrix::from_fn(n, n, |i, j| -D_PLUS[n - 1 - i][n - 1 - j]);
    let h = [1.0, 5.0, 4.0, 5.0, 1.0].iter().map(|v| v / 16.0).collect();
    UpwindOperator {
        length: 1.0,
        h,
        d_plus,
        d_minus,
    }
}

impl UpwindOperator {
    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Same pair rescaled to a block of length `length`.
    pub fn scaled(&self, length: f64) -> Self {
        let f = length / self.length;
        UpwindOperator {
            length,
            h: self.h.iter().map(|v| v * f).collect(),
            d_plus: &self.d_plus / f,
            d_minus: &self.d_minus / f,
        }
    }

    pub fn h(&self) -> &[f64] {
        &self.h
    }

    pub fn d_plus(&self) -> &DMatrix<f64> {
        &self.d_plus
    }

    pub fn d_minus(&self) -> &DMatrix<f64> {
        &self.d_minus
    }

    pub fn d_central(&self) -> DMatrix<f64> {
        (&self.d_plus + &self.d_minus) * 0.5
    }

    /// `S = -H (D+ - D-) / 2`, the built-in dissipation.
    pub fn s(&self) -> DMatrix<f64> {
        let mut s = (&self.d_plus - &self.d_minus) * -0.5;
        for i in 0..self.len() {
            s.row_mut(i).scale_mut(self.h[i]);
        }
        s
    }

    pub fn nodes(&self) -> Vec<f64> {
        let n = self.len();
        (0..n).map(|j| self.length * j as f64 / (n - 1) as f64).collect()
    }

    /// Smallest eigenvalue of the symmetric part of `S`.
    pub fn s_min_eigenvalue(&self) -> f64 {
        let s = self.s();
        let sym = (&s + s.transpose()) * 0.5;
        SymmetricEigen::new(sym).eigenvalues.min()
    }
}
