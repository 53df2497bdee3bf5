//! Tensor-product application of 1D dissipation on a 2D block.
//!
//! Operators are built in physical coordinates on Cartesian blocks, so the
//! metric Jacobian is absorbed into the 1D norms: along a line in x the
//! factor `H^-1 H_y` reduces to the 1D `H_x^-1`.

use super::{Coefficients, DissipationError, DissipationOperator};
use crate::physics::Direction;
use crate::Scalar;

/// Shape of a 2D block; node `(ix, iy)` is stored at `iy * nx + ix`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Block2d {
    pub nx: usize,
    pub ny: usize,
    pub nvar: usize,
}

/// Adds the dissipation in direction `dir` to `out`. Coefficients are
/// nodal over the whole block.
pub fn apply_dissipation_2d<S: Scalar>(
    dir: Direction,
    block: Block2d,
    diss_x: &DissipationOperator,
    diss_y: &DissipationOperator,
    q: &[S],
    coeff: Coefficients<'_, S>,
    out: &mut [S],
) -> Result<(), DissipationError> {
    let Block2d { nx, ny, nvar } = block;
    if diss_x.len() != nx || diss_y.len() != ny {
        return Err(DissipationError::DimensionMismatch {
            expected: nx * ny,
            got: diss_x.len() * diss_y.len(),
        });
    }
    let total = nx * ny * nvar;
    for len in [q.len(), out.len()] {
        if len != total {
            return Err(DissipationError::DimensionMismatch {
                expected: total,
                got: len,
            });
        }
    }
    let per_node = match coeff {
        Coefficients::Unit => 0,
        Coefficients::Scalar(a) => {
            check_len(a.len(), nx * ny)?;
            1
        }
        Coefficients::Blocks(a) => {
            check_len(a.len(), nx * ny * nvar * nvar)?;
            nvar * nvar
        }
    };
    let (op, lines, len) = match dir {
        Direction::X => (diss_x, ny, nx),
        Direction::Y => (diss_y, nx, ny),
    };
    let node = |line: usize, k: usize| match dir {
        Direction::X => line * nx + k,
        Direction::Y => k * nx + line,
    };
    let mut ql = vec![S::zero(); len * nvar];
    let mut ol = vec![S::zero(); len * nvar];
    let mut cl = vec![S::zero(); len * per_node];
    for line in 0..lines {
        for k in 0..len {
            let j = node(line, k);
            ql[k * nvar..(k + 1) * nvar].copy_from_slice(&q[j * nvar..(j + 1) * nvar]);
            match coeff {
                Coefficients::Unit => {}
                Coefficients::Scalar(a) | Coefficients::Blocks(a) => cl
                    [k * per_node..(k + 1) * per_node]
                    .copy_from_slice(&a[j * per_node..(j + 1) * per_node]),
            }
        }
        ol.iter_mut().for_each(|v| *v = S::zero());
        let c = match coeff {
            Coefficients::Unit => Coefficients::Unit,
            Coefficients::Scalar(_) => Coefficients::Scalar(&cl[..]),
            Coefficients::Blocks(_) => Coefficients::Blocks(&cl[..]),
        };
        op.apply(nvar, &ql, c, &mut ol)?;
        for k in 0..len {
            let j = node(line, k);
            for v in 0..nvar {
                out[j * nvar + v] += ol[k * nvar + v];
            }
        }
    }
    Ok(())
}

fn check_len(got: usize, expected: usize) -> Result<(), DissipationError> {
    if got == expected {
        Ok(())
    } else {
        Err(DissipationError::DimensionMismatch { expected, got })
    }
}
