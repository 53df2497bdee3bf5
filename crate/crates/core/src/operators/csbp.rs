//! Classical diagonal-norm SBP closures.
//!
//! The boundary block is obtained from the SBP and accuracy conditions as a
//! small linear system. For p <= 2 the system is fully determined; for p = 3
//! and p = 4 the free parameters are fixed by the minimum-norm solution.

use std::sync::OnceLock;

use nalgebra::{DMatrix, DVector};

use super::{Family, OperatorError};

/// Interior skew stencil `c_k`, so that row i of `Q` is
/// `sum_k c_k (u_{i+k} - u_{i-k})`.
fn interior(p: usize) -> &'static [f64] {
    match p {
        1 => &[0.5],
        2 => &[2.0 / 3.0, -1.0 / 12.0],
        3 => &[0.75, -0.15, 1.0 / 60.0],
        4 => &[0.8, -0.2, 4.0 / 105.0, -1.0 / 280.0],
        _ => unreachable!("degree checked by caller"),
    }
}

pub(super) fn block_size(p: usize) -> usize {
    match p {
        1 => 1,
        2 => 4,
        3 => 6,
        4 => 8,
        _ => 2 * p,
    }
}

#[derive(Debug, Clone)]
struct Closure {
    h: Vec<f64>,
    /// Upper triangle of the skew part in the r x r block.
    q: DMatrix<f64>,
}

fn derive(p: usize) -> Result<Closure, String> {
    let r = block_size(p);
    let c = interior(p);
    let width = r + p;
    let shift = r as f64 / 2.0;
    let xs: Vec<f64> = (0..width).map(|j| j as f64 - shift).collect();

    // Unknown layout: h_0..h_{r-1}, then q_ij (i<j<r) row by row.
    let mut pair = vec![vec![usize::MAX; r]; r];
    let mut nu = r;
    for i in 0..r {
        for j in i + 1..r {
            pair[i][j] = nu;
            nu += 1;
        }
    }
    let neq = r * (p + 1);
    let mut a = DMatrix::<f64>::zeros(neq, nu);
    let mut b = DVector::<f64>::zeros(neq);
    for i in 0..r {
        for k in 0..=p {
            let row = i * (p + 1) + k;
            let mono = |j: usize| xs[j].powi(k as i32);
            // Known entries: Q_00 = -1/2 and the interior coupling j >= r.
            if i == 0 {
                b[row] += 0.5 * mono(0);
            }
            for j in r..width {
                let off = j - i;
                if off >= 1 && off <= p {
                    b[row] -= c[off - 1] * mono(j);
                }
            }
            for j in 0..r {
                if j > i {
                    a[(row, pair[i][j])] += mono(j);
                } else if j < i {
                    a[(row, pair[j][i])] -= mono(j);
                }
            }
            if k >= 1 {
                a[(row, i)] -= k as f64 * xs[i].powi(k as i32 - 1);
            }
        }
    }
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let tol = 1e-10 * smax;
    let mut x = svd.solve(&b, tol)?;
    let res = &b - &a * &x;
    x += svd.solve(&res, tol)?;
    let residual = (&b - &a * &x).amax();
    if residual > 1e-11 {
        return Err(format!("closure system inconsistent (residual {residual:e})"));
    }
    let h: Vec<f64> = x.iter().take(r).cloned().collect();
    let mut q = DMatrix::zeros(r, r);
    for i in 0..r {
        for j in i + 1..r {
            q[(i, j)] = x[pair[i][j]];
        }
    }
    Ok(Closure { h, q })
}

fn closure(p: usize) -> Result<&'static Closure, OperatorError> {
    static CACHE: OnceLock<Vec<Result<Closure, String>>> = OnceLock::new();
    let all = CACHE.get_or_init(|| (1..=4).map(derive).collect());
    all[p - 1].as_ref().map_err(|e| OperatorError::Construction(e.clone()))
}

/// Undivided norm diagonal and `Q` for `n` nodes.
pub(super) fn build(p: usize, n: usize) -> Result<(Vec<f64>, DMatrix<f64>), OperatorError> {
    if !(1..=4).contains(&p) {
        return Err(OperatorError::DegreeUnsupported {
            family: Family::Csbp,
            p,
        });
    }
    let required = super::csbp_min_nodes(p);
    if n < required {
        return Err(OperatorError::InsufficientNodes {
            family: Family::Csbp,
            p,
            required,
            got: n,
        });
    }
    let cl = closure(p)?;
    let r = block_size(p);
    let c = interior(p);
    let mut q = DMatrix::zeros(n, n);
    for i in 0..n {
        for (k, &ck) in c.iter().enumerate() {
            let off = k + 1;
            if i + off < n {
                q[(i, i + off)] = ck;
            }
            if i >= off {
                q[(i, i - off)] = -ck;
            }
        }
    }
    for i in 0..r {
        for j in 0..r {
            let v = if i < j {
                cl.q[(i, j)]
            } else if j < i {
                -cl.q[(j, i)]
            } else {
                0.0
            };
            q[(i, j)] = v;
            q[(n - 1 - i, n - 1 - j)] = -v;
        }
    }
    q[(0, 0)] = -0.5;
    q[(n - 1, n - 1)] = 0.5;
    let mut h = vec![1.0; n];
    for i in 0..r {
        h[i] = cl.h[i];
        h[n - 1 - i] = cl.h[i];
    }
    Ok((h, q))
}
