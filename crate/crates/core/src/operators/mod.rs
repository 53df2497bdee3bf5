//! Nodal distributions and diagonal-norm SBP first-derivative operators.

mod csbp;
mod legendre;
mod upwind;

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use legendre::{gauss_nodes, lobatto_nodes};
pub use upwind::{build_upwind_pu2_block, UpwindOperator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OperatorError {
    #[error("unsupported nodal family `{0}` (expected CSBP, LGL or LG)")]
    UnsupportedFamily(String),
    #[error("{family} with p={p} needs at least {required} nodes, got {got}")]
    InsufficientNodes {
        family: Family,
        p: usize,
        required: usize,
        got: usize,
    },
    #[error("{family} with p={p} uses exactly {expected} nodes per element, got {got}")]
    NodeCountMismatch {
        family: Family,
        p: usize,
        expected: usize,
        got: usize,
    },
    #[error("degree p={p} unsupported for {family}")]
    DegreeUnsupported { family: Family, p: usize },
    #[error("element size must be finite and positive, got {0}")]
    InvalidElementSize(f64),
    #[error("operator construction failed: {0}")]
    Construction(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    #[serde(rename = "CSBP")]
    Csbp,
    #[serde(rename = "LGL")]
    Lgl,
    #[serde(rename = "LG")]
    Lg,
}

impl Family {
    pub fn is_spectral(self) -> bool {
        !matches!(self, Family::Csbp)
    }

    /// Whether the first and last nodes sit on the element boundary.
    pub fn has_boundary_nodes(self) -> bool {
        !matches!(self, Family::Lg)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Csbp => "CSBP",
            Family::Lgl => "LGL",
            Family::Lg => "LG",
        })
    }
}

impl FromStr for Family {
    type Err = OperatorError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "CSBP" => Ok(Family::Csbp),
            "LGL" => Ok(Family::Lgl),
            "LG" => Ok(Family::Lg),
            _ => Err(OperatorError::UnsupportedFamily(s.to_string())),
        }
    }
}

/// Nodes on the undivided reference domain `[0, N-1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct NodalDistribution {
    family: Family,
    p: usize,
    nodes: Vec<f64>,
    reference: Option<Vec<f64>>,
}

impl NodalDistribution {
    pub fn family(&self) -> Family {
        self.family
    }

    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Undivided nodes `x~`.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Nodes on `[-1, 1]` for spectral-element families.
    pub fn reference_nodes(&self) -> Option<&[f64]> {
        self.reference.as_deref()
    }
}

/// Minimum node count required by the CSBP closures of degree `p`.
pub fn csbp_min_nodes(p: usize) -> usize {
    (2 * p + 1).max(2 * csbp::block_size(p))
}

pub fn build_nodal_distribution(
    family: Family,
    p: usize,
    n: usize,
) -> Result<NodalDistribution, OperatorError> {
    if p == 0 {
        return Err(OperatorError::DegreeUnsupported { family, p });
    }
    match family {
        Family::Csbp => {
            if n < 2 * p + 1 {
                return Err(OperatorError::InsufficientNodes {
                    family,
                    p,
                    required: 2 * p + 1,
                    got: n,
                });
            }
            Ok(NodalDistribution {
                family,
                p,
                nodes: (0..n).map(|j| j as f64).collect(),
                reference: None,
            })
        }
        Family::Lgl | Family::Lg => {
            if n != p + 1 {
                return Err(OperatorError::NodeCountMismatch {
                    family,
                    p,
                    expected: p + 1,
                    got: n,
                });
            }
            let xi = if family == Family::Lgl {
                lobatto_nodes(p)
            } else {
                gauss_nodes(p + 1)
            };
            let half = p as f64 / 2.0;
            Ok(NodalDistribution {
                family,
                p,
                nodes: xi.iter().map(|&x| (x + 1.0) * half).collect(),
                reference: Some(xi),
            })
        }
    }
}

/// Diagonal-norm SBP first-derivative operator for one block.
#[derive(Debug, Clone)]
pub struct SbpOperator {
    dist: NodalDistribution,
    dx: f64,
    h: Vec<f64>,
    d: DMatrix<f64>,
    q: DMatrix<f64>,
    e: DMatrix<f64>,
    e_left: Vec<f64>,
    e_right: Vec<f64>,
}

impl SbpOperator {
    pub fn dist(&self) -> &NodalDistribution {
        &self.dist
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.dist.p
    }

    pub fn family(&self) -> Family {
        self.dist.family
    }

    /// Physical spacing of the undivided unit.
    pub fn element_size(&self) -> f64 {
        self.dx
    }

    /// Physical block length, `(N-1) dx`.
    pub fn length(&self) -> f64 {
        (self.len() - 1) as f64 * self.dx
    }

    /// Diagonal of `H`.
    pub fn h(&self) -> &[f64] {
        &self.h
    }

    /// Diagonal of `H~ = H / dx`.
    pub fn h_undivided(&self) -> Vec<f64> {
        self.h.iter().map(|&v| v / self.dx).collect()
    }

    pub fn d(&self) -> &DMatrix<f64> {
        &self.d
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn e(&self) -> &DMatrix<f64> {
        &self.e
    }

    /// Interpolation to the left block boundary.
    pub fn e_left(&self) -> &[f64] {
        &self.e_left
    }

    pub fn e_right(&self) -> &[f64] {
        &self.e_right
    }

    /// Physical node positions relative to the block's left end.
    pub fn physical_nodes(&self) -> Vec<f64> {
        self.dist.nodes.iter().map(|&x| x * self.dx).collect()
    }

    /// Residuals of the SBP, accuracy and norm invariants.
    pub fn check(&self) -> OperatorCheck {
        let n = self.len();
        let sbp = (&self.q + self.q.transpose() - &self.e).amax() / self.q.amax();
        let x = self.physical_nodes();
        let mut accuracy: f64 = 0.0;
        for k in 0..=self.degree() {
            let xk: Vec<f64> = x.iter().map(|&v| v.powi(k as i32)).collect();
            let scale = if k == 0 {
                1.0
            } else {
                x.iter().map(|&v| (k as f64 * v.powi(k as i32 - 1)).abs()).fold(0.0, f64::max)
            };
            for i in 0..n {
                let dxk: f64 = (0..n).map(|j| self.d[(i, j)] * xk[j]).sum();
                let exact = if k == 0 { 0.0 } else { k as f64 * x[i].powi(k as i32 - 1) };
                accuracy = accuracy.max((dxk - exact).abs() / scale.max(1.0));
            }
        }
        let total: f64 = self.h.iter().sum();
        OperatorCheck {
            sbp,
            accuracy,
            norm_sum: (total - self.length()).abs() / self.length(),
            min_norm: self.h.iter().cloned().fold(f64::INFINITY, f64::min),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorCheck {
    /// `|Q + Q^T - E|_max / |Q|_max`.
    pub sbp: f64,
    /// Worst relative monomial error up to degree p.
    pub accuracy: f64,
    pub norm_sum: f64,
    pub min_norm: f64,
}

impl OperatorCheck {
    pub fn passes(&self) -> bool {
        self.sbp <= 1e-12 && self.accuracy <= 1e-10 && self.norm_sum <= 1e-12 && self.min_norm > 0.0
    }
}

pub fn build_sbp_operator(
    dist: &NodalDistribution,
    element_size: f64,
) -> Result<SbpOperator, OperatorError> {
    if !(element_size.is_finite() && element_size > 0.0) {
        return Err(OperatorError::InvalidElementSize(element_size));
    }
    let n = dist.len();
    let (h_und, d_und, e_left, e_right) = match dist.family {
        Family::Csbp => {
            let (h, q) = csbp::build(dist.p, n)?;
            let mut d = q;
            for i in 0..n {
                d.row_mut(i).scale_mut(1.0 / h[i]);
            }
            let mut el = vec![0.0; n];
            let mut er = vec![0.0; n];
            el[0] = 1.0;
            er[n - 1] = 1.0;
            (h, d, el, er)
        }
        Family::Lgl | Family::Lg => {
            let xi = dist.reference.as_ref().expect("spectral nodes");
            let half = dist.p as f64 / 2.0;
            let w = if dist.family == Family::Lgl {
                legendre::lobatto_weights(xi)
            } else {
                legendre::gauss_weights(xi)
            };
            let d_ref = legendre::lagrange_derivative(xi);
            // d/dx~ = (2/p) d/dxi with x~ = (xi+1) p/2.
            let d = d_ref / half;
            let h = w.iter().map(|&v| v * half).collect();
            (
                h,
                d,
                legendre::lagrange_basis_at(xi, -1.0),
                legendre::lagrange_basis_at(xi, 1.0),
            )
        }
    };
    let h: Vec<f64> = h_und.iter().map(|&v| v * element_size).collect();
    let d = d_und / element_size;
    let mut q = d.clone();
    for i in 0..n {
        q.row_mut(i).scale_mut(h[i]);
    }
    let e = DMatrix::from_fn(n, n, |i, j| e_right[i] * e_right[j] - e_left[i] * e_left[j]);
    let op = SbpOperator {
        dist: dist.clone(),
        dx: element_size,
        h,
        d,
        q,
        e,
        e_left,
        e_right,
    };
    let check = op.check();
    if !check.passes() {
        return Err(OperatorError::Construction(format!(
            "{} p={} N={} failed verification: {check:?}",
            dist.family, dist.p, n
        )));
    }
    Ok(op)
}
