//! Legendre quadrature nodes, weights and Lagrange differentiation on [-1, 1].

use nalgebra::DMatrix;
use std::f64::consts::PI;

const NEWTON_TOL: f64 = 1e-15;
const NEWTON_MAX: usize = 100;

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
pub(crate) fn legendre(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let (mut p0, mut p1) = (1.0, x);
    let (mut d0, mut d1) = (0.0, 1.0);
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        // P'_{k+1} = P'_{k-1} + (2k+1) P_k
        let d2 = d0 + (2.0 * kf + 1.0) * p1;
        p0 = p1;
        p1 = p2;
        d0 = d1;
        d1 = d2;
    }
    (p1, d1)
}

fn newton<F: Fn(f64) -> (f64, f64)>(mut x: f64, f: F) -> f64 {
    for _ in 0..NEWTON_MAX {
        let (v, dv) = f(x);
        let step = v / dv;
        x -= step;
        if step.abs() < NEWTON_TOL {
            break;
        }
    }
    x
}

fn symmetrize(x: &mut [f64]) {
    let n = x.len();
    for k in 0..n / 2 {
        let a = 0.5 * (x[n - 1 - k] - x[k]);
        x[k] = -a;
        x[n - 1 - k] = a;
    }
    if n % 2 == 1 {
        x[n / 2] = 0.0;
    }
}

/// Roots of `P_n`, ascending.
pub fn gauss_nodes(n: usize) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n)
        .map(|k| {
            let seed = -(PI * (4 * k + 3) as f64 / (4 * n + 2) as f64).cos();
            newton(seed, |t| legendre(n, t))
        })
        .collect();
    symmetrize(&mut x);
    x
}

/// Roots of `(1 - x^2) P_p'(x)`, ascending.
pub fn lobatto_nodes(p: usize) -> Vec<f64> {
    let mut x = vec![-1.0];
    for k in 1..p {
        let seed = -(PI * k as f64 / p as f64).cos();
        let pf = p as f64;
        x.push(newton(seed, |t| {
            let (v, dv) = legendre(p, t);
            let ddv = (2.0 * t * dv - pf * (pf + 1.0) * v) / (1.0 - t * t);
            (dv, ddv)
        }));
    }
    x.push(1.0);
    symmetrize(&mut x);
    x
}

pub(crate) fn gauss_weights(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    x.iter()
        .map(|&t| {
            let (_, dv) = legendre(n, t);
            2.0 / ((1.0 - t * t) * dv * dv)
        })
        .collect()
}

pub(crate) fn lobatto_weights(x: &[f64]) -> Vec<f64> {
    let p = x.len() - 1;
    let pf = p as f64;
    x.iter()
        .map(|&t| {
            let (v, _) = legendre(p, t);
            2.0 / (pf * (pf + 1.0) * v * v)
        })
        .collect()
}

fn barycentric_weights(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|j| {
            1.0 / (0..x.len())
                .filter(|&k| k != j)
                .map(|k| x[j] - x[k])
                .product::<f64>()
        })
        .collect()
}

/// `D_ij = l_j'(x_i)` with the negative-sum trick on the diagonal.
pub(crate) fn lagrange_derivative(x: &[f64]) -> DMatrix<f64> {
    let n = x.len();
    let lam = barycentric_weights(x);
    let mut d = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut diag = 0.0;
        for j in 0..n {
            if i != j {
                let v = lam[j] / lam[i] / (x[i] - x[j]);
                d[(i, j)] = v;
                diag -= v;
            }
        }
        d[(i, i)] = diag;
    }
    d
}

/// Values `l_j(t)` of all Lagrange basis polynomials at `t`.
pub(crate) fn lagrange_basis_at(x: &[f64], t: f64) -> Vec<f64> {
    if let Some(k) = x.iter().position(|&v| v == t) {
        let mut e = vec![0.0; x.len()];
        e[k] = 1.0;
        return e;
    }
    let lam = barycentric_weights(x);
    let terms: Vec<f64> = lam.iter().zip(x).map(|(&l, &v)| l / (t - v)).collect();
    let total: f64 = terms.iter().sum();
    terms.iter().map(|v| v / total).collect()
}
