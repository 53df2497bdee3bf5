//! Grid-convergence studies.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub grid_sizes: Vec<usize>,
    pub errors: Vec<f64>,
    /// Least-squares slope of `-log(error)` against `log(N)`; `None` when
    /// every error is at round-off and a fit is meaningless.
    pub rate: Option<f64>,
    /// Root-mean-square residual of the log-log fit.
    pub fit_residual: Option<f64>,
}

/// Errors below this are treated as round-off.
const ROUNDOFF: f64 = 1e-12;

/// `||u - U||_H = sqrt((u - U)^T H (u - U))`.
pub fn h_norm_error(weights: &[f64], u: &[f64], exact: &[f64]) -> f64 {
    let nv = u.len() / weights.len();
    u.chunks(nv)
        .zip(exact.chunks(nv))
        .zip(weights)
        .map(|((a, b), w)| w * a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>())
        .sum::<f64>()
        .sqrt()
}

/// Rate and residual of `log e = c - r log N` by least squares.
pub fn fit_rate(sizes: &[f64], errors: &[f64]) -> (f64, f64) {
    let x: Vec<f64> = sizes.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = errors.iter().map(|v| v.ln()).collect();
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let res = (x
        .iter()
        .zip(&y)
        .map(|(a, b)| (b - (my + slope * (a - mx))).powi(2))
        .sum::<f64>()
        / n)
        .sqrt();
    (-slope, res)
}

/// Runs `run(N)` for every grid (concurrently) and fits the rate.
pub fn run_convergence<E, F>(grids: &[usize], run: F) -> Result<ConvergenceReport, E>
where
    E: Send,
    F: Fn(usize) -> Result<f64, E> + Sync,
{
    let errors: Vec<f64> = grids.par_iter().map(|&n| run(n)).collect::<Result<_, _>>()?;
    let fit = grids.len() >= 3 && errors.iter().any(|&e| e > ROUNDOFF);
    let (rate, fit_residual) = if fit {
        let sizes: Vec<f64> = grids.iter().map(|&n| n as f64).collect();
        let (r, res) = fit_rate(&sizes, &errors);
        (Some(r), Some(res))
    } else {
        (None, None)
    };
    Ok(ConvergenceReport {
        grid_sizes: grids.to_vec(),
        errors,
        rate,
        fit_residual,
    })
}
