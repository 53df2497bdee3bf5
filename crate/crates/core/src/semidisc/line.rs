//! Residual along one periodic line of blocks.

use super::law::Law;
use super::{BlockOperator, Parts, SatKind, Scheme, SemidiscError};
use crate::dissipation::{Coefficients, DissipationConfig, DissipationOperator, VariableSet};
use crate::physics::Direction;
use crate::Scalar;

type Sparse = Vec<Vec<(usize, f64)>>;

fn sparse(m: &nalgebra::DMatrix<f64>) -> Sparse {
    (0..m.nrows())
        .map(|i| {
            (0..m.ncols())
                .filter(|&j| m[(i, j)] != 0.0)
                .map(|j| (j, m[(i, j)]))
                .collect()
        })
        .collect()
}

fn sparse_vec(v: &[f64]) -> Vec<(usize, f64)> {
    v.iter()
        .enumerate()
        .filter(|(_, &e)| e != 0.0)
        .map(|(j, &e)| (j, e))
        .collect()
}

/// One block's operators in one direction, in the form the engine uses.
#[derive(Debug, Clone)]
pub(crate) struct LineOp {
    pub n: usize,
    pub h: Vec<f64>,
    pub h_inv: Vec<f64>,
    pub nodes: Vec<f64>,
    pub length: f64,
    d: Sparse,
    /// `(i, j, D_ij, D_ji)` for `i < j` with either entry nonzero.
    pairs: Vec<(usize, usize, f64, f64)>,
    upwind: Option<(Sparse, Sparse)>,
    e_l: Vec<(usize, f64)>,
    e_r: Vec<(usize, f64)>,
    pub diss: Option<DissipationOperator>,
}

impl LineOp {
    pub fn new(op: &BlockOperator, diss: Option<&DissipationConfig>) -> Result<Self, SemidiscError> {
        let (h, d, upwind, e_l, e_r, nodes, length) = match op {
            BlockOperator::Sbp(s) => (
                s.h().to_vec(),
                s.d().clone(),
                None,
                s.e_left().to_vec(),
                s.e_right().to_vec(),
                s.physical_nodes(),
                s.length(),
            ),
            BlockOperator::Upwind(u) => {
                let n = u.len();
                let mut el = vec![0.0; n];
                let mut er = vec![0.0; n];
                el[0] = 1.0;
                er[n - 1] = 1.0;
                (
                    u.h().to_vec(),
                    u.d_central(),
                    Some((sparse(u.d_plus()), sparse(u.d_minus()))),
                    el,
                    er,
                    u.nodes(),
                    u.length(),
                )
            }
        };
        let n = h.len();
        let mut pairs = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                if d[(i, j)] != 0.0 || d[(j, i)] != 0.0 {
                    pairs.push((i, j, d[(i, j)], d[(j, i)]));
                }
            }
        }
        let diss = match (diss, op) {
            (None, _) => None,
            (Some(cfg), BlockOperator::Sbp(s)) => Some(DissipationOperator::new(s, *cfg)?),
            (Some(_), BlockOperator::Upwind(_)) => {
                return Err(SemidiscError::Unsupported(
                    "volume dissipation on upwind operators".into(),
                ))
            }
        };
        Ok(LineOp {
            n,
            h_inv: h.iter().map(|v| 1.0 / v).collect(),
            h,
            nodes,
            length,
            d: sparse(&d),
            pairs,
            upwind,
            e_l: sparse_vec(&e_l),
            e_r: sparse_vec(&e_r),
            diss,
        })
    }

    pub fn min_spacing(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min)
    }
}

pub(crate) struct LineSetup<'a, L> {
    pub law: &'a L,
    pub op: &'a LineOp,
    pub scheme: Scheme,
    pub sat: SatKind,
    pub dir: Direction,
    pub blocks: usize,
    pub parts: Parts,
}

/// Adds the residual of a periodic chain of `blocks` blocks to `out`.
/// `u` and `out` hold `blocks * n * nvar` values, node-major.
pub(crate) fn line_residual<L: Law, S: Scalar>(
    cfg: &LineSetup<'_, L>,
    u: &[S],
    out: &mut [S],
) -> Result<(), SemidiscError> {
    let law = cfg.law;
    let op = cfg.op;
    let nv = law.nvar();
    let n = op.n;
    let k = cfg.blocks;
    let dir = cfg.dir;
    let total = k * n;
    let idx = |b: usize, i: usize| (b * n + i) * nv;

    let mut f = vec![S::zero(); total * nv];
    for j in 0..total {
        law.flux(&u[j * nv..(j + 1) * nv], dir, &mut f[j * nv..(j + 1) * nv]);
    }

    if cfg.parts.volume {
        match cfg.scheme {
            Scheme::Central => {
                // Differences against the node's own flux: `D 1 = 0`, and this
                // keeps free streams exact to round-off.
                for b in 0..k {
                    for i in 0..n {
                        let oi = idx(b, i);
                        for &(j, dij) in &op.d[i] {
                            let fj = idx(b, j);
                            for v in 0..nv {
                                out[oi + v] -= (f[fj + v] - f[oi + v]) * dij;
                            }
                        }
                    }
                }
            }
            Scheme::HadamardEntropyStable | Scheme::SplitFormBurgers => {
                // `-2 sum_j D_ij f*(u_i, u_j)`, written against `f(u_i)` as above;
                // the diagonal term drops out.
                let mut fs = [S::zero(); 4];
                for b in 0..k {
                    for &(i, j, dij, dji) in &op.pairs {
                        let (oi, oj) = (idx(b, i), idx(b, j));
                        law.ec_flux(&u[oi..oi + nv], &u[oj..oj + nv], dir, &mut fs[..nv]);
                        for v in 0..nv {
                            out[oi + v] -= (fs[v] - f[oi + v]) * (2.0 * dij);
                            out[oj + v] -= (fs[v] - f[oj + v]) * (2.0 * dji);
                        }
                    }
                }
            }
            Scheme::UpwindFVS => {
                let (dp, dm) = op.upwind.as_ref().ok_or_else(|| {
                    SemidiscError::Unsupported("flux splitting needs an upwind operator".into())
                })?;
                let mut fp = vec![S::zero(); total * nv];
                let mut fm = vec![S::zero(); total * nv];
                for j in 0..total {
                    let r = j * nv..(j + 1) * nv;
                    if !law.flux_split(&u[r.clone()], dir, &mut fp[r.clone()], &mut fm[r]) {
                        return Err(SemidiscError::Unsupported(format!(
                            "{} has no flux-vector splitting here",
                            law.name()
                        )));
                    }
                }
                for b in 0..k {
                    for i in 0..n {
                        let oi = idx(b, i);
                        for &(j, d) in &dp[i] {
                            for v in 0..nv {
                                out[oi + v] -= fm[idx(b, j) + v] * d;
                            }
                        }
                        for &(j, d) in &dm[i] {
                            for v in 0..nv {
                                out[oi + v] -= fp[idx(b, j) + v] * d;
                            }
                        }
                    }
                }
            }
        }
    }

    if cfg.parts.interface {
        let mut um = [S::zero(); 4];
        let mut up = [S::zero(); 4];
        let mut fr = [S::zero(); 4];
        let mut fl = [S::zero(); 4];
        let mut fhat = [S::zero(); 4];
        let mut tmp = [S::zero(); 4];
        let mut tmp2 = [S::zero(); 4];
        for b in 0..k {
            let bn = (b + 1) % k;
            for v in 0..nv {
                um[v] = S::zero();
                up[v] = S::zero();
                fr[v] = S::zero();
                fl[v] = S::zero();
            }
            for &(j, e) in &op.e_r {
                for v in 0..nv {
                    um[v] += u[idx(b, j) + v] * e;
                    fr[v] += f[idx(b, j) + v] * e;
                }
            }
            for &(j, e) in &op.e_l {
                for v in 0..nv {
                    up[v] += u[idx(bn, j) + v] * e;
                    fl[v] += f[idx(bn, j) + v] * e;
                }
            }
            match cfg.scheme {
                Scheme::HadamardEntropyStable | Scheme::SplitFormBurgers => {
                    law.ec_flux(&um[..nv], &up[..nv], dir, &mut fhat[..nv]);
                }
                _ => {
                    law.flux(&um[..nv], dir, &mut tmp[..nv]);
                    law.flux(&up[..nv], dir, &mut tmp2[..nv]);
                    for v in 0..nv {
                        fhat[v] = (tmp[v] + tmp2[v]) * 0.5;
                    }
                }
            }
            match cfg.sat {
                SatKind::Symmetric => {}
                SatKind::LaxFriedrichs | SatKind::Rusanov => {
                    let lam = law
                        .max_wave_speed(&um[..nv], dir)
                        .max_re(law.max_wave_speed(&up[..nv], dir));
                    for v in 0..nv {
                        fhat[v] -= lam * (up[v] - um[v]) * 0.5;
                    }
                }
                SatKind::RoeMatrix => {
                    law.roe_dissipation(&um[..nv], &up[..nv], dir, &mut tmp[..nv]);
                    for v in 0..nv {
                        fhat[v] -= tmp[v] * 0.5;
                    }
                }
                SatKind::EntropyDissipativeMatrix => {
                    law.entropy_dissipation(&um[..nv], &up[..nv], dir, &mut tmp[..nv])
                        .map_err(|e| SemidiscError::NonAdmissibleState {
                            node: b * n + n - 1,
                            source: e,
                        })?;
                    for v in 0..nv {
                        fhat[v] -= tmp[v] * 0.5;
                    }
                }
            }
            for &(j, e) in &op.e_r {
                let s = op.h_inv[j] * e;
                for v in 0..nv {
                    out[idx(b, j) + v] += (fr[v] - fhat[v]) * s;
                }
            }
            for &(j, e) in &op.e_l {
                let s = op.h_inv[j] * e;
                for v in 0..nv {
                    out[idx(bn, j) + v] -= (fl[v] - fhat[v]) * s;
                }
            }
        }
    }

    if cfg.parts.dissipation {
        if let Some(d) = &op.diss {
            let dc = d.config();
            let bs = n * nv;
            let mut q = vec![S::zero(); bs];
            let nn = if dc.mode.is_block() { nv * nv } else { 1 };
            let mut coef = vec![S::zero(); n * nn];
            for b in 0..k {
                let ub = &u[b * bs..(b + 1) * bs];
                match dc.variables {
                    VariableSet::Conservative => q.copy_from_slice(ub),
                    VariableSet::Entropy => {
                        for j in 0..n {
                            law.entropy_variables(&ub[j * nv..(j + 1) * nv], &mut q[j * nv..(j + 1) * nv])
                                .map_err(|e| SemidiscError::NonAdmissibleState {
                                    node: b * n + j,
                                    source: e,
                                })?;
                        }
                    }
                }
                let coeff = if dc.mode.is_block() {
                    for j in 0..n {
                        law.system_block(
                            &ub[j * nv..(j + 1) * nv],
                            dc.mode,
                            dir,
                            &mut coef[j * nn..(j + 1) * nn],
                        )
                        .map_err(|e| SemidiscError::NonAdmissibleState {
                            node: b * n + j,
                            source: e,
                        })?;
                    }
                    Coefficients::Blocks(&coef[..])
                } else {
                    for j in 0..n {
                        coef[j] = law.scalar_coefficient(&ub[j * nv..(j + 1) * nv], dir);
                    }
                    Coefficients::Scalar(&coef[..])
                };
                d.apply(nv, &q, coeff, &mut out[b * bs..(b + 1) * bs])?;
            }
        }
    }
    Ok(())
}
