//! Periodic semi-discretizations `du/dt = R(u)` in one and two dimensions.
//!
//! A grid is a periodic chain (1D) or lattice (2D) of identical blocks. In
//! 2D the residual is the sum of line residuals along x and along y, each a
//! 1D engine over a chain of blocks. Global states are node-major with the
//! variables of a node adjacent; in 2D node `(gx, gy)` sits at
//! `gy * (Kx * Nx) + gx`.

mod law;
mod line;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dissipation::{DissipationConfig, DissipationError};
use crate::operators::{SbpOperator, UpwindOperator};
use crate::physics::{Direction, PhysicsError};
use crate::solver::{Rhs, RhsError};
use crate::Scalar;
use line::{line_residual, LineOp, LineSetup};
use num_complex::Complex64;

pub use law::{Burgers, Law, LinearAdvection};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SemidiscError {
    #[error("non-admissible state at node {node}: {source}")]
    NonAdmissibleState { node: usize, source: PhysicsError },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error("state has {got} values, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Dissipation(#[from] DissipationError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Scheme {
    Central,
    SplitFormBurgers,
    HadamardEntropyStable,
    UpwindFVS,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SatKind {
    Symmetric,
    LaxFriedrichs,
    Rusanov,
    RoeMatrix,
    EntropyDissipativeMatrix,
}

#[derive(Debug, Clone)]
pub enum BlockOperator {
    Sbp(SbpOperator),
    Upwind(UpwindOperator),
}

impl From<SbpOperator> for BlockOperator {
    fn from(op: SbpOperator) -> Self {
        BlockOperator::Sbp(op)
    }
}

impl From<UpwindOperator> for BlockOperator {
    fn from(op: UpwindOperator) -> Self {
        BlockOperator::Upwind(op)
    }
}

/// Which terms of the residual to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Parts {
    pub volume: bool,
    pub interface: bool,
    pub dissipation: bool,
}

impl Parts {
    pub const ALL: Parts = Parts {
        volume: true,
        interface: true,
        dissipation: true,
    };
    pub const DISSIPATION: Parts = Parts {
        volume: false,
        interface: false,
        dissipation: true,
    };
    pub const WITHOUT_DISSIPATION: Parts = Parts {
        volume: true,
        interface: true,
        dissipation: false,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct Functionals {
    /// `u^T H u` summed over variables.
    pub energy: f64,
    /// `1^T H S(u)`.
    pub entropy: f64,
    /// `1^T H u` per variable.
    pub totals: Vec<f64>,
}

/// A PDE, grid, scheme, SAT and optional dissipation.
#[derive(Debug, Clone)]
pub struct SemiDiscretization<L> {
    law: L,
    lines: Vec<LineOp>,
    blocks: [usize; 2],
    origin: [f64; 2],
    scheme: Scheme,
    sat: SatKind,
    dissipation: Option<DissipationConfig>,
}

fn validate<L: Law>(
    law: &L,
    ops: &[&BlockOperator],
    scheme: Scheme,
) -> Result<(), SemidiscError> {
    for op in ops {
        let upwind = matches!(op, BlockOperator::Upwind(_));
        match scheme {
            Scheme::UpwindFVS if !upwind => {
                return Err(SemidiscError::Unsupported(
                    "flux-vector splitting needs an upwind operator".into(),
                ))
            }
            Scheme::HadamardEntropyStable | Scheme::SplitFormBurgers => {
                if let BlockOperator::Sbp(s) = op {
                    if !s.family().has_boundary_nodes() {
                        return Err(SemidiscError::Unsupported(
                            "Hadamard form on operators without boundary nodes".into(),
                        ));
                    }
                }
            }
            _ => {}
        }
    }
    if scheme == Scheme::SplitFormBurgers && law.name() != "burgers" {
        return Err(SemidiscError::Unsupported(
            "split form is defined for Burgers only".into(),
        ));
    }
    Ok(())
}

impl<L: Law> SemiDiscretization<L> {
    /// Periodic chain of `blocks` copies of `op` starting at `x0`.
    pub fn new_1d(
        law: L,
        op: BlockOperator,
        blocks: usize,
        x0: f64,
        scheme: Scheme,
        sat: SatKind,
        dissipation: Option<DissipationConfig>,
    ) -> Result<Self, SemidiscError> {
        if law.dim() != 1 {
            return Err(SemidiscError::Unsupported(format!("{}D law on a 1D grid", law.dim())));
        }
        if blocks == 0 {
            return Err(SemidiscError::Unsupported("zero blocks".into()));
        }
        validate(&law, &[&op], scheme)?;
        let line = LineOp::new(&op, dissipation.as_ref())?;
        Ok(SemiDiscretization {
            law,
            lines: vec![line],
            blocks: [blocks, 1],
            origin: [x0, 0.0],
            scheme,
            sat,
            dissipation,
        })
    }

    /// Periodic lattice of `kx x ky` blocks with tensor-product operators.
    #[allow(clippy::too_many_arguments)]
    pub fn new_2d(
        law: L,
        op_x: BlockOperator,
        op_y: BlockOperator,
        blocks: [usize; 2],
        origin: [f64; 2],
        scheme: Scheme,
        sat: SatKind,
        dissipation: Option<DissipationConfig>,
    ) -> Result<Self, SemidiscError> {
        if law.dim() != 2 {
            return Err(SemidiscError::Unsupported(format!("{}D law on a 2D grid", law.dim())));
        }
        if blocks[0] == 0 || blocks[1] == 0 {
            return Err(SemidiscError::Unsupported("zero blocks".into()));
        }
        validate(&law, &[&op_x, &op_y], scheme)?;
        let lx = LineOp::new(&op_x, dissipation.as_ref())?;
        let ly = LineOp::new(&op_y, dissipation.as_ref())?;
        Ok(SemiDiscretization {
            law,
            lines: vec![lx, ly],
            blocks,
            origin,
            scheme,
            sat,
            dissipation,
        })
    }

    pub fn law(&self) -> &L {
        &self.law
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn sat(&self) -> SatKind {
        self.sat
    }

    pub fn dissipation(&self) -> Option<&DissipationConfig> {
        self.dissipation.as_ref()
    }

    pub fn spatial_dim(&self) -> usize {
        self.lines.len()
    }

    /// Global node counts per direction.
    pub fn grid_shape(&self) -> [usize; 2] {
        let nx = self.blocks[0] * self.lines[0].n;
        let ny = if self.lines.len() == 2 {
            self.blocks[1] * self.lines[1].n
        } else {
            1
        };
        [nx, ny]
    }

    pub fn num_nodes(&self) -> usize {
        let [nx, ny] = self.grid_shape();
        nx * ny
    }

    pub fn len(&self) -> usize {
        self.num_nodes() * self.law.nvar()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn axis_nodes(&self, a: usize) -> Vec<f64> {
        let line = &self.lines[a];
        let mut x = Vec::with_capacity(self.blocks[a] * line.n);
        for b in 0..self.blocks[a] {
            for &r in &line.nodes {
                x.push(self.origin[a] + b as f64 * line.length + r);
            }
        }
        x
    }

    fn axis_weights(&self, a: usize) -> Vec<f64> {
        let line = &self.lines[a];
        (0..self.blocks[a]).flat_map(|_| line.h.iter().cloned()).collect()
    }

    /// Physical coordinates of every node, `(x, y)` (y = 0 in 1D).
    pub fn coordinates(&self) -> Vec<[f64; 2]> {
        let x = self.axis_nodes(0);
        if self.lines.len() == 1 {
            return x.into_iter().map(|v| [v, 0.0]).collect();
        }
        let y = self.axis_nodes(1);
        let mut out = Vec::with_capacity(x.len() * y.len());
        for &yv in &y {
            for &xv in &x {
                out.push([xv, yv]);
            }
        }
        out
    }

    /// Quadrature weight of every node (diagonal of the global `H`).
    pub fn weights(&self) -> Vec<f64> {
        let wx = self.axis_weights(0);
        if self.lines.len() == 1 {
            return wx;
        }
        let wy = self.axis_weights(1);
        let mut out = Vec::with_capacity(wx.len() * wy.len());
        for &b in &wy {
            for &a in &wx {
                out.push(a * b);
            }
        }
        out
    }

    /// Physical length of the periodic domain per direction.
    pub fn domain_length(&self) -> [f64; 2] {
        let lx = self.blocks[0] as f64 * self.lines[0].length;
        let ly = if self.lines.len() == 2 {
            self.blocks[1] as f64 * self.lines[1].length
        } else {
            0.0
        };
        [lx, ly]
    }

    /// Fills `u` from a nodal function of `(x, y)`.
    pub fn project<F: Fn(f64, f64, &mut [f64])>(&self, f: F) -> Vec<f64> {
        let nv = self.law.nvar();
        let mut u = vec![0.0; self.len()];
        for (j, c) in self.coordinates().iter().enumerate() {
            f(c[0], c[1], &mut u[j * nv..(j + 1) * nv]);
        }
        u
    }

    fn check_len(&self, got: usize) -> Result<(), SemidiscError> {
        if got != self.len() {
            return Err(SemidiscError::DimensionMismatch {
                expected: self.len(),
                got,
            });
        }
        Ok(())
    }

    fn check_states<S: Scalar>(&self, u: &[S]) -> Result<(), SemidiscError> {
        let nv = self.law.nvar();
        for (node, ui) in u.chunks(nv).enumerate() {
            self.law
                .check_state(ui)
                .map_err(|source| SemidiscError::NonAdmissibleState { node, source })?;
        }
        Ok(())
    }

    /// Full residual, `out = R(u)`.
    pub fn rhs<S: Scalar>(&self, u: &[S], out: &mut [S]) -> Result<(), SemidiscError> {
        self.residual(u, out, Parts::ALL)
    }

    /// Selected residual terms, `out = R_parts(u)`.
    pub fn residual<S: Scalar>(&self, u: &[S], out: &mut [S], parts: Parts) -> Result<(), SemidiscError> {
        self.check_len(u.len())?;
        self.check_len(out.len())?;
        self.check_states(u)?;
        out.iter_mut().for_each(|v| *v = S::zero());
        let nv = self.law.nvar();
        let setup = |a: usize, dir: Direction| LineSetup {
            law: &self.law,
            op: &self.lines[a],
            scheme: self.scheme,
            sat: self.sat,
            dir,
            blocks: self.blocks[a],
            parts,
        };
        if self.lines.len() == 1 {
            return line_residual(&setup(0, Direction::X), u, out);
        }
        let [nx, ny] = self.grid_shape();
        let row = nx * nv;
        let sx = setup(0, Direction::X);
        out.par_chunks_mut(row)
            .zip(u.par_chunks(row))
            .try_for_each(|(o, ul)| line_residual(&sx, ul, o))?;
        let sy = setup(1, Direction::Y);
        let cols: Vec<Vec<S>> = (0..nx)
            .into_par_iter()
            .map(|gx| {
                let mut ul = vec![S::zero(); ny * nv];
                for gy in 0..ny {
                    let src = (gy * nx + gx) * nv;
                    ul[gy * nv..(gy + 1) * nv].copy_from_slice(&u[src..src + nv]);
                }
                let mut ol = vec![S::zero(); ny * nv];
                line_residual(&sy, &ul, &mut ol).map(|_| ol)
            })
            .collect::<Result<_, _>>()?;
        for (gx, ol) in cols.iter().enumerate() {
            for gy in 0..ny {
                let dst = (gy * nx + gx) * nv;
                for v in 0..nv {
                    out[dst + v] += ol[gy * nv + v];
                }
            }
        }
        Ok(())
    }

    pub fn evaluate_functionals(&self, u: &[f64]) -> Functionals {
        let nv = self.law.nvar();
        let w = self.weights();
        let mut totals = vec![0.0; nv];
        let mut energy = 0.0;
        let mut entropy = 0.0;
        for (j, ui) in u.chunks(nv).enumerate() {
            for v in 0..nv {
                totals[v] += w[j] * ui[v];
                energy += w[j] * ui[v] * ui[v];
            }
            entropy += w[j] * self.law.entropy(ui);
        }
        Functionals {
            energy,
            entropy,
            totals,
        }
    }

    /// `w^T H r`: the entropy production rate of a residual `r` at `u`.
    pub fn entropy_production(&self, u: &[f64], r: &[f64]) -> Result<f64, SemidiscError> {
        let nv = self.law.nvar();
        let h = self.weights();
        let mut w = vec![0.0; nv];
        let mut acc = 0.0;
        for (j, (ui, ri)) in u.chunks(nv).zip(r.chunks(nv)).enumerate() {
            self.law
                .entropy_variables(ui, &mut w)
                .map_err(|source| SemidiscError::NonAdmissibleState { node: j, source })?;
            acc += h[j] * (0..nv).map(|v| w[v] * ri[v]).sum::<f64>();
        }
        Ok(acc)
    }

    /// Explicit time-step bound `min spacing / max wave speed`.
    pub fn stable_dt(&self, u: &[f64]) -> f64 {
        let nv = self.law.nvar();
        let mut best = f64::INFINITY;
        for (a, line) in self.lines.iter().enumerate() {
            let dir = if a == 0 { Direction::X } else { Direction::Y };
            let lam = u
                .chunks(nv)
                .map(|ui| self.law.max_wave_speed(ui, dir))
                .fold(0.0, f64::max);
            if lam > 0.0 {
                best = best.min(line.min_spacing() / lam);
            }
        }
        best
    }
}

impl<L: Law> Rhs for SemiDiscretization<L> {
    fn dim(&self) -> usize {
        self.len()
    }

    fn eval(&self, _t: f64, u: &[f64], out: &mut [f64]) -> Result<(), RhsError> {
        self.rhs(u, out).map_err(RhsError::from)
    }

    fn eval_complex(&self, _t: f64, u: &[Complex64], out: &mut [Complex64]) -> Result<(), RhsError> {
        self.rhs(u, out).map_err(RhsError::from)
    }

    fn check_state(&self, u: &[f64]) -> Result<(), RhsError> {
        self.check_states(u).map_err(RhsError::from)
    }

    fn stable_dt(&self, u: &[f64]) -> Option<f64> {
        Some(SemiDiscretization::stable_dt(self, u))
    }
}
