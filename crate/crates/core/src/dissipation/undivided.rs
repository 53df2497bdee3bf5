//! Minimum-width undivided difference operators.

use nalgebra::{DMatrix, DVector};

use super::DissipationError;
use crate::operators::NodalDistribution;

/// One row of `D~_s`: coefficients on columns `start .. start + s`.
#[derive(Debug, Clone, PartialEq)]
pub struct StencilRow {
    pub start: usize,
    pub coefs: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct UndividedDiff {
    s: usize,
    dist: NodalDistribution,
    rows: Vec<StencilRow>,
    clamped: Vec<bool>,
}

/// How far a row's window reaches back. Even orders are centred on the
/// node; odd orders are centred on the half node to the left.
fn reach_back(s: usize) -> usize {
    if s % 2 == 0 {
        s / 2
    } else {
        s.div_ceil(2)
    }
}

fn window(i: usize, s: usize, n: usize) -> (usize, bool) {
    let back = reach_back(s);
    let ideal = i as isize - back as isize;
    let start = ideal.clamp(0, (n - 1 - s) as isize);
    (start as usize, start != ideal)
}

/// Which rows of an `n`-node operator of order `s` have clamped windows.
pub(crate) fn clamp_pattern(n: usize, s: usize) -> Vec<bool> {
    (0..n).map(|i| window(i, s, n).1).collect()
}

fn factorial(s: usize) -> f64 {
    (1..=s).map(|k| k as f64).product()
}

pub fn build_undivided_diff(
    dist: &NodalDistribution,
    s: usize,
) -> Result<UndividedDiff, DissipationError> {
    let n = dist.len();
    if s == 0 || s + 1 > n {
        return Err(DissipationError::OrderTooHigh { s, n });
    }
    if dist.family().is_spectral() && s != dist.degree() {
        return Err(DissipationError::SpectralOrderMismatch {
            s,
            p: dist.degree(),
        });
    }
    let x = dist.nodes();
    let mut rows = Vec::with_capacity(n);
    let mut clamped = Vec::with_capacity(n);
    for i in 0..n {
        let (start, was_clamped) = window(i, s, n);
        let xs = &x[start..=start + s];
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(DissipationError::SingularStencil { row: i });
        }
        let mid = 0.5 * (xs[0] + xs[s]);
        let half = 0.5 * (xs[s] - xs[0]);
        // Scaled nodes t = (x - mid)/half keep the Vandermonde system tame.
        let v = DMatrix::from_fn(s + 1, s + 1, |k, j| ((xs[j] - mid) / half).powi(k as i32));
        let mut rhs = DVector::zeros(s + 1);
        rhs[s] = factorial(s) / half.powi(s as i32);
        let c = v
            .clone()
            .lu()
            .solve(&rhs)
            .ok_or(DissipationError::SingularStencil { row: i })?;
        let res = (&v * &c - &rhs).amax() / rhs.amax();
        if !(res <= 1e-12) {
            return Err(DissipationError::SingularStencil { row: i });
        }
        rows.push(StencilRow {
            start,
            coefs: c.iter().cloned().collect(),
        });
        clamped.push(was_clamped);
    }
    Ok(UndividedDiff {
        s,
        dist: dist.clone(),
        rows,
        clamped,
    })
}

impl UndividedDiff {
    pub fn order(&self) -> usize {
        self.s
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dist(&self) -> &NodalDistribution {
        &self.dist
    }

    pub fn rows(&self) -> &[StencilRow] {
        &self.rows
    }

    /// Rows whose window had to be shifted to stay inside the block.
    pub fn clamped_rows(&self) -> &[bool] {
        &self.clamped
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut m = DMatrix::zeros(n, n);
        for (i, r) in self.rows.iter().enumerate() {
            for (k, &c) in r.coefs.iter().enumerate() {
                m[(i, r.start + k)] = c;
            }
        }
        m
    }

    /// Largest relative residual of the accuracy conditions, measured on
    /// each row's own window so that large node values do not mask errors.
    pub fn accuracy_residual(&self) -> f64 {
        let x = self.dist.nodes();
        let mut worst: f64 = 0.0;
        for r in &self.rows {
            let xs = &x[r.start..=r.start + self.s];
            let mid = 0.5 * (xs[0] + xs[self.s]);
            for k in 0..=self.s {
                let mut acc = 0.0;
                let mut scale = 0.0;
                for (c, &xj) in r.coefs.iter().zip(xs) {
                    let t = c * (xj - mid).powi(k as i32);
                    acc += t;
                    scale += t.abs();
                }
                let target = if k == self.s { factorial(self.s) } else { 0.0 };
                worst = worst.max((acc - target).abs() / scale.max(1.0));
            }
        }
        worst
    }
}
