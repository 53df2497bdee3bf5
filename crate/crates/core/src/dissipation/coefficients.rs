//! Variable coefficients for scalar and system dissipation.

use super::{CoefficientMode, Coefficients, DissipationError};
use crate::physics::{Direction, Euler, PhysicsError};
use crate::Scalar;

/// Nodal coefficient values together with their interpretation.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    mode: CoefficientMode,
    block: usize,
    values: Vec<f64>,
}

fn check_nonnegative(a: &[f64]) -> Result<(), DissipationError> {
    match a.iter().position(|&v| !(v >= 0.0)) {
        Some(index) => Err(DissipationError::NegativeCoefficient {
            index,
            value: a[index],
        }),
        None => Ok(()),
    }
}

impl CoefficientField {
    pub fn constant(n: usize, c: f64) -> Result<Self, DissipationError> {
        Self::nodal_scalar(vec![c; n])
    }

    pub fn nodal_scalar(values: Vec<f64>) -> Result<Self, DissipationError> {
        check_nonnegative(&values)?;
        Ok(CoefficientField {
            mode: CoefficientMode::NodalScalar,
            block: 1,
            values,
        })
    }

    /// Nodal values that the operator averages onto half nodes.
    pub fn half_node_scalar(values: Vec<f64>) -> Result<Self, DissipationError> {
        check_nonnegative(&values)?;
        Ok(CoefficientField {
            mode: CoefficientMode::HalfNodeScalar,
            block: 1,
            values,
        })
    }

    pub fn mode(&self) -> CoefficientMode {
        self.mode
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        self.values.len() / (self.block * self.block)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn as_coefficients(&self) -> Coefficients<'_, f64> {
        if self.mode.is_block() {
            Coefficients::Blocks(&self.values)
        } else {
            Coefficients::Scalar(&self.values)
        }
    }

    /// Block at node `j`, row-major.
    pub fn node_block(&self, j: usize) -> &[f64] {
        let nn = self.block * self.block;
        &self.values[j * nn..(j + 1) * nn]
    }

    /// Row-aligned blocks for odd `s`: a leading zero block, then the
    /// arithmetic mean of neighbouring nodal blocks.
    pub fn half_node_blocks(&self) -> Vec<f64> {
        let nn = self.block * self.block;
        let n = self.len();
        let mut out = vec![0.0; n * nn];
        for i in 1..n {
            for k in 0..nn {
                out[i * nn + k] = 0.5 * (self.values[(i - 1) * nn + k] + self.values[i * nn + k]);
            }
        }
        out
    }
}

/// `diag(0, (a_1+a_2)/2, ..., (a_{N-1}+a_N)/2)`.
pub fn average_coefficient_halfnodes(a: &[f64]) -> Result<Vec<f64>, DissipationError> {
    check_nonnegative(a)?;
    let mut out = vec![0.0; a.len()];
    for i in 1..a.len() {
        out[i] = 0.5 * (a[i - 1] + a[i]);
    }
    Ok(out)
}

/// Dissipation block at one Euler state, written row-major into `out`.
pub fn system_block<S: Scalar>(
    euler: &Euler,
    u: &[S],
    mode: CoefficientMode,
    dir: Direction,
    out: &mut [S],
) -> Result<(), PhysicsError> {
    euler.admissible(u)?;
    let n = euler.nvar();
    let m = match mode {
        CoefficientMode::ScalarBlock => {
            let lam = euler.max_wave_speed(u, dir);
            let mut m = [S::zero(); 16];
            for i in 0..n {
                m[i * n + i] = lam;
            }
            m
        }
        CoefficientMode::MatrixBlock => euler.abs_jacobian(&euler.eigen(u, dir)),
        CoefficientMode::ScalarMatrixBlock => {
            let lam = euler.max_wave_speed(u, dir);
            let mut m = euler.dudw(u);
            m.iter_mut().for_each(|v| *v *= lam);
            m
        }
        CoefficientMode::MatrixMatrixBlock => euler.abs_jacobian_entropy(&euler.eigen(u, dir)),
        CoefficientMode::NodalScalar | CoefficientMode::HalfNodeScalar => {
            unreachable!("scalar modes have no system block")
        }
    };
    out[..n * n].copy_from_slice(&m[..n * n]);
    Ok(())
}

/// Per-node blocks for conservative states stored node-major.
pub fn build_system_blocks(
    euler: &Euler,
    states: &[f64],
    mode: CoefficientMode,
    dir: Direction,
) -> Result<CoefficientField, DissipationError> {
    if !mode.is_block() {
        return Err(DissipationError::InvalidMode(mode));
    }
    let n = euler.nvar();
    if states.len() % n != 0 {
        return Err(DissipationError::DimensionMismatch {
            expected: n * (states.len() / n + 1),
            got: states.len(),
        });
    }
    let nodes = states.len() / n;
    let mut values = vec![0.0; nodes * n * n];
    for j in 0..nodes {
        system_block(
            euler,
            &states[j * n..(j + 1) * n],
            mode,
            dir,
            &mut values[j * n * n..(j + 1) * n * n],
        )?;
    }
    Ok(CoefficientField {
        mode,
        block: n,
        values,
    })
}
