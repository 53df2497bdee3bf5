//! Shared builders for the integration tests.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sbpdiss::dissipation::{CoefficientMode, DissipationConfig};
use sbpdiss::operators::{build_nodal_distribution, build_sbp_operator, Family, SbpOperator};
use sbpdiss::physics::Euler;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Operator of `n` nodes spanning `length`.
pub fn op(family: Family, p: usize, n: usize, length: f64) -> SbpOperator {
    let dist = build_nodal_distribution(family, p, n).unwrap();
    build_sbp_operator(&dist, length / (n - 1) as f64).unwrap()
}

pub fn csbp(p: usize, n: usize, length: f64) -> SbpOperator {
    op(Family::Csbp, p, n, length)
}

/// One spectral element of degree `p` spanning `length`.
pub fn element(family: Family, p: usize, length: f64) -> SbpOperator {
    op(family, p, p + 1, length)
}

/// Large preset `3.125 * 5^-s`.
pub fn eps_large(s: usize) -> f64 {
    3.125 * 5f64.powi(-(s as i32))
}

/// Small preset `0.625 * 5^-s`.
pub fn eps_small(s: usize) -> f64 {
    0.625 * 5f64.powi(-(s as i32))
}

pub fn diss(s: usize, eps: f64, mode: CoefficientMode) -> DissipationConfig {
    DissipationConfig::new(s, eps).with_mode(mode)
}

/// Random admissible Euler state with moderate density, speed and pressure.
pub fn euler_state(rng: &mut impl Rng, euler: &Euler) -> Vec<f64> {
    let rho = rng.gen_range(0.2..3.0);
    let vel = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
    let p = rng.gen_range(0.2..5.0);
    let mut u = vec![0.0; euler.nvar()];
    euler.conservative(rho, vel, p, &mut u);
    u
}

pub fn euler_field(rng: &mut impl Rng, euler: &Euler, nodes: usize) -> Vec<f64> {
    (0..nodes).flat_map(|_| euler_state(rng, euler)).collect()
}

pub fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn dot_h(h: &[f64], a: &[f64], b: &[f64]) -> f64 {
    let nv = a.len() / h.len();
    a.chunks(nv)
        .zip(b.chunks(nv))
        .zip(h)
        .map(|((x, y), w)| w * x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .sum()
}
