//! Volume dissipation `A_D = -eps H^-1 Dt_s^T C Dt_s`.
//!
//! `C = (H~) (B) A` where the optional factors are the undivided norm and the
//! boundary correction. The coefficient `A` is either a scalar per row or an
//! `n x n` block per row; for odd `s` it is averaged onto the half nodes the
//! odd-order stencils are centred on.

mod boundary;
mod coefficients;
mod two_d;
mod undivided;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::operators::SbpOperator;
use crate::physics::PhysicsError;
use crate::Scalar;

pub use boundary::{build_boundary_correction, BoundaryCorrection};
pub use coefficients::{
    average_coefficient_halfnodes, build_system_blocks, system_block, CoefficientField,
};
pub use two_d::{apply_dissipation_2d, Block2d};
pub use undivided::{build_undivided_diff, StencilRow, UndividedDiff};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DissipationError {
    #[error("stencil for row {row} is singular (repeated or unordered nodes)")]
    SingularStencil { row: usize },
    #[error("order s={s} needs at least s+1 nodes, got {n}")]
    OrderTooHigh { s: usize, n: usize },
    #[error("spectral elements require s = p (got s={s}, p={p})")]
    SpectralOrderMismatch { s: usize, p: usize },
    #[error("coefficient {index} is negative ({value})")]
    NegativeCoefficient { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("odd s with a non-constant nodal coefficient requires half-node averaging")]
    HalfNodeRequired,
    #[error("coefficient mode {0:?} not valid here")]
    InvalidMode(CoefficientMode),
    #[error(transparent)]
    Physics(#[from] PhysicsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CoefficientMode {
    NodalScalar,
    HalfNodeScalar,
    ScalarBlock,
    MatrixBlock,
    ScalarMatrixBlock,
    MatrixMatrixBlock,
}

impl CoefficientMode {
    pub fn is_block(self) -> bool {
        !matches!(self, CoefficientMode::NodalScalar | CoefficientMode::HalfNodeScalar)
    }

    /// Variable set the dissipation acts on for system modes.
    pub fn natural_variables(self) -> VariableSet {
        match self {
            CoefficientMode::ScalarMatrixBlock | CoefficientMode::MatrixMatrixBlock => {
                VariableSet::Entropy
            }
            _ => VariableSet::Conservative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum VariableSet {
    Conservative,
    Entropy,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DissipationConfig {
    pub s: usize,
    pub eps: f64,
    pub include_b: bool,
    pub include_htilde: bool,
    pub mode: CoefficientMode,
    pub variables: VariableSet,
}

impl DissipationConfig {
    pub fn new(s: usize, eps: f64) -> Self {
        DissipationConfig {
            s,
            eps,
            include_b: true,
            include_htilde: false,
            mode: CoefficientMode::NodalScalar,
            variables: VariableSet::Conservative,
        }
    }

    pub fn with_mode(mut self, mode: CoefficientMode) -> Self {
        self.mode = mode;
        self.variables = mode.natural_variables();
        self
    }
}

/// Row coefficients handed to [`DissipationOperator::apply`], given at nodes.
#[derive(Debug, Clone, Copy)]
pub enum Coefficients<'a, S> {
    /// `A = I`.
    Unit,
    /// One scalar per node, shared by all variables.
    Scalar(&'a [S]),
    /// One row-major `nvar x nvar` block per node.
    Blocks(&'a [S]),
}

/// Assembled dissipation for one block and one direction.
#[derive(Debug, Clone)]
pub struct DissipationOperator {
    cfg: DissipationConfig,
    diff: UndividedDiff,
    b: BoundaryCorrection,
    /// Diagonal of `(H~)(B)` per row.
    weight: Vec<f64>,
    h_inv: Vec<f64>,
    half_nodes: bool,
}

impl DissipationOperator {
    pub fn new(op: &SbpOperator, cfg: DissipationConfig) -> Result<Self, DissipationError> {
        let diff = build_undivided_diff(op.dist(), cfg.s)?;
        let n = op.len();
        let b = if cfg.include_b {
            BoundaryCorrection::from_clamped(diff.clamped_rows())
        } else {
            BoundaryCorrection::identity(n)
        };
        let ht = op.h_undivided();
        let weight = (0..n)
            .map(|i| b.diag()[i] * if cfg.include_htilde { ht[i] } else { 1.0 })
            .collect();
        let half_nodes = cfg.s % 2 == 1 && cfg.mode != CoefficientMode::NodalScalar;
        Ok(DissipationOperator {
            cfg,
            diff,
            b,
            weight,
            h_inv: op.h().iter().map(|h| 1.0 / h).collect(),
            half_nodes,
        })
    }

    pub fn config(&self) -> &DissipationConfig {
        &self.cfg
    }

    pub fn order(&self) -> usize {
        self.cfg.s
    }

    pub fn eps(&self) -> f64 {
        self.cfg.eps
    }

    pub fn len(&self) -> usize {
        self.h_inv.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h_inv.is_empty()
    }

    pub fn undivided(&self) -> &UndividedDiff {
        &self.diff
    }

    pub fn boundary(&self) -> &BoundaryCorrection {
        &self.b
    }

    /// Whether coefficients are averaged onto half nodes.
    pub fn uses_half_nodes(&self) -> bool {
        self.half_nodes
    }

    /// Row-aligned scalar coefficient from nodal values.
    fn row_scalar<S: Scalar>(&self, a: &[S], i: usize) -> S {
        if self.half_nodes {
            if i == 0 {
                S::zero()
            } else {
                (a[i - 1] + a[i]) * 0.5
            }
        } else {
            a[i]
        }
    }

    /// Adds `A_D q` to `out`. `q` and `out` hold `len() * nvar` values,
    /// node-major.
    pub fn apply<S: Scalar>(
        &self,
        nvar: usize,
        q: &[S],
        coeff: Coefficients<'_, S>,
        out: &mut [S],
    ) -> Result<(), DissipationError> {
        let n = self.len();
        for len in [q.len(), out.len()] {
            if len != n * nvar {
                return Err(DissipationError::DimensionMismatch {
                    expected: n * nvar,
                    got: len,
                });
            }
        }
        match coeff {
            Coefficients::Unit => {}
            Coefficients::Scalar(a) => {
                if a.len() != n {
                    return Err(DissipationError::DimensionMismatch {
                        expected: n,
                        got: a.len(),
                    });
                }
                if !self.half_nodes && self.cfg.s % 2 == 1 && a.iter().any(|&v| v != a[0]) {
                    return Err(DissipationError::HalfNodeRequired);
                }
            }
            Coefficients::Blocks(a) => {
                if a.len() != n * nvar * nvar {
                    return Err(DissipationError::DimensionMismatch {
                        expected: n * nvar * nvar,
                        got: a.len(),
                    });
                }
            }
        }
        let eps = self.cfg.eps;
        let mut y = vec![S::zero(); nvar];
        let mut z = vec![S::zero(); nvar];
        for (i, row) in self.diff.rows().iter().enumerate() {
            let w = self.weight[i];
            if w == 0.0 {
                continue;
            }
            y.iter_mut().for_each(|v| *v = S::zero());
            for (k, &c) in row.coefs.iter().enumerate() {
                let base = (row.start + k) * nvar;
                for v in 0..nvar {
                    y[v] += q[base + v] * c;
                }
            }
            match coeff {
                Coefficients::Unit => {
                    for v in 0..nvar {
                        z[v] = y[v] * w;
                    }
                }
                Coefficients::Scalar(a) => {
                    let ai = self.row_scalar(a, i) * w;
                    for v in 0..nvar {
                        z[v] = y[v] * ai;
                    }
                }
                Coefficients::Blocks(a) => {
                    let nn = nvar * nvar;
                    let block = |j: usize, r: usize| -> S {
                        (0..nvar).map(|c| a[j * nn + r * nvar + c] * y[c]).sum()
                    };
                    for r in 0..nvar {
                        z[r] = if self.half_nodes {
                            if i == 0 {
                                S::zero()
                            } else {
                                (block(i - 1, r) + block(i, r)) * (0.5 * w)
                            }
                        } else {
                            block(i, r) * w
                        };
                    }
                }
            }
            for (k, &c) in row.coefs.iter().enumerate() {
                let j = row.start + k;
                let f = eps * self.h_inv[j] * c;
                for v in 0..nvar {
                    out[j * nvar + v] -= z[v] * f;
                }
            }
        }
        Ok(())
    }

    /// Dense `A_D` for a scalar nodal coefficient (`None` means `A = I`).
    pub fn dense(&self, coeff: Option<&[f64]>) -> Result<DMatrix<f64>, DissipationError> {
        let n = self.len();
        let c: Vec<f64> = match coeff {
            None => self.weight.clone(),
            Some(a) => {
                if a.len() != n {
                    return Err(DissipationError::DimensionMismatch {
                        expected: n,
                        got: a.len(),
                    });
                }
                if !self.half_nodes && self.cfg.s % 2 == 1 && a.iter().any(|&v| v != a[0]) {
                    return Err(DissipationError::HalfNodeRequired);
                }
                (0..n).map(|i| self.weight[i] * self.row_scalar(a, i)).collect()
            }
        };
        let dt = self.diff.matrix();
        let mut cd = dt.clone();
        for i in 0..n {
            cd.row_mut(i).scale_mut(c[i]);
        }
        let mut m = dt.transpose() * cd;
        for i in 0..n {
            m.row_mut(i).scale_mut(-self.cfg.eps * self.h_inv[i]);
        }
        Ok(m)
    }
}

/// Scalar dissipation together with its dense matrix.
#[derive(Debug, Clone)]
pub struct AssembledDissipation {
    pub operator: DissipationOperator,
    pub matrix: DMatrix<f64>,
}

pub fn assemble_scalar_dissipation(
    op: &SbpOperator,
    s: usize,
    eps: f64,
    include_b: bool,
    include_htilde: bool,
    coeff: &CoefficientField,
) -> Result<AssembledDissipation, DissipationError> {
    if coeff.mode().is_block() {
        return Err(DissipationError::InvalidMode(coeff.mode()));
    }
    if coeff.len() != op.len() {
        return Err(DissipationError::DimensionMismatch {
            expected: op.len(),
            got: coeff.len(),
        });
    }
    let cfg = DissipationConfig {
        s,
        eps,
        include_b,
        include_htilde,
        mode: coeff.mode(),
        variables: VariableSet::Conservative,
    };
    let operator = DissipationOperator::new(op, cfg)?;
    let matrix = operator.dense(Some(coeff.values()))?;
    Ok(AssembledDissipation { operator, matrix })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{build_nodal_distribution, build_sbp_operator, Family};

    fn csbp(p: usize, n: usize, dx: f64) -> SbpOperator {
        let d = build_nodal_distribution(Family::Csbp, p, n).unwrap();
        build_sbp_operator(&d, dx).unwrap()
    }

    #[test]
    fn matrix_free_matches_dense() {
        let op = csbp(3, 20, 0.1);
        let a: Vec<f64> = (0..20).map(|i| 1.0 + 0.1 * (i as f64).sin()).collect();
        for (s, mode) in [(4, CoefficientMode::NodalScalar), (3, CoefficientMode::HalfNodeScalar)] {
            let mut cfg = DissipationConfig::new(s, 0.3);
            cfg.mode = mode;
            cfg.include_htilde = true;
            let d = DissipationOperator::new(&op, cfg).unwrap();
            let m = d.dense(Some(&a)).unwrap();
            let q: Vec<f64> = (0..20).map(|i| ((i * i) as f64 * 0.37).cos()).collect();
            let mut out = vec![0.0; 20];
            d.apply(1, &q, Coefficients::Scalar(&a), &mut out).unwrap();
            for i in 0..20 {
                let r: f64 = (0..20).map(|j| m[(i, j)] * q[j]).sum();
                assert!((r - out[i]).abs() < 1e-13 * (1.0 + r.abs()));
            }
        }
    }

    #[test]
    fn odd_order_rejects_varying_nodal_coefficient() {
        let op = csbp(2, 12, 1.0);
        let d = DissipationOperator::new(&op, DissipationConfig::new(3, 1.0)).unwrap();
        let a: Vec<f64> = (0..12).map(|i| i as f64).collect();
        let q = vec![0.0; 12];
        let mut out = vec![0.0; 12];
        assert_eq!(
            d.apply(1, &q, Coefficients::Scalar(&a), &mut out),
            Err(DissipationError::HalfNodeRequired)
        );
    }

    #[test]
    fn dimension_checked() {
        let op = csbp(2, 12, 1.0);
        let d = DissipationOperator::new(&op, DissipationConfig::new(2, 1.0)).unwrap();
        let mut out = vec![0.0; 12];
        assert!(matches!(
            d.apply(1, &[0.0; 11], Coefficients::Unit, &mut out),
            Err(DissipationError::DimensionMismatch { .. })
        ));
    }
}
