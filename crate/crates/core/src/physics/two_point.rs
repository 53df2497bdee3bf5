//! Entropy-conservative two-point fluxes for the Euler equations.

use super::{Direction, Euler, PhysicsError};
use crate::Scalar;

/// Below this value of `((b-a)/(b+a))^2` the logarithmic mean switches
/// to its series so that nearly equal arguments do not cancel.
const LOG_MEAN_SERIES: f64 = 1e-4;

/// Logarithmic mean `(b - a) / (ln b - ln a)`.
pub fn log_mean<S: Scalar>(a: S, b: S) -> S {
    // Fixed argument order keeps the result exactly symmetric.
    let (a, b) = if a.re() <= b.re() { (a, b) } else { (b, a) };
    let f = (b - a) / (b + a);
    let u = f * f;
    let big_f = if u.re() < LOG_MEAN_SERIES {
        S::one() + u * (S::one() / 3.0 + u * (S::from_f64(0.2) + u / 7.0))
    } else {
        (b / a).ln() / (f * 2.0)
    };
    (a + b) / (big_f * 2.0)
}

fn check(euler: &Euler, ul: &[impl Scalar], ur: &[impl Scalar]) -> Result<(), PhysicsError> {
    euler.admissible(ul)?;
    euler.admissible(ur)?;
    Ok(())
}

/// Chandrashekar's kinetic-energy-preserving, entropy-conservative flux (1D).
pub fn chandrashekar_flux<S: Scalar>(
    euler: &Euler,
    ul: &[S],
    ur: &[S],
    out: &mut [S],
) -> Result<(), PhysicsError> {
    check(euler, ul, ur)?;
    chandrashekar_unchecked(euler, ul, ur, out);
    Ok(())
}

pub(crate) fn chandrashekar_unchecked<S: Scalar>(euler: &Euler, ul: &[S], ur: &[S], out: &mut [S]) {
    let g = euler.gamma;
    let (l, r) = (euler.primitive(ul), euler.primitive(ur));
    let (vl, vr) = (l.vel[0], r.vel[0]);
    let bl = l.rho / (l.p * 2.0);
    let br = r.rho / (r.p * 2.0);
    let rho_ln = log_mean(l.rho, r.rho);
    let beta_ln = log_mean(bl, br);
    let rho_avg = (l.rho + r.rho) * 0.5;
    let beta_avg = (bl + br) * 0.5;
    let v_avg = (vl + vr) * 0.5;
    let v2_avg = (vl * vl + vr * vr) * 0.5;
    let f1 = rho_ln * v_avg;
    let f2 = rho_avg / (beta_avg * 2.0) + v_avg * f1;
    out[0] = f1;
    out[1] = f2;
    out[2] = f1 * (S::one() / (beta_ln * (2.0 * (g - 1.0))) - v2_avg * 0.5) + v_avg * f2;
}

/// Ranocha's entropy-conservative, kinetic-energy-preserving flux (2D).
pub fn ranocha_flux_2d<S: Scalar>(
    euler: &Euler,
    ul: &[S],
    ur: &[S],
    dir: Direction,
    out: &mut [S],
) -> Result<(), PhysicsError> {
    check(euler, ul, ur)?;
    ranocha_unchecked(euler, ul, ur, dir, out);
    Ok(())
}

pub(crate) fn ranocha_unchecked<S: Scalar>(
    euler: &Euler,
    ul: &[S],
    ur: &[S],
    dir: Direction,
    out: &mut [S],
) {
    let g = euler.gamma;
    let (l, r) = (euler.primitive(ul), euler.primitive(ur));
    let rho_mean = log_mean(l.rho, r.rho);
    let inv_rho_p_mean = l.p * r.p / log_mean(l.rho * r.p, r.rho * l.p);
    let v1 = (l.vel[0] + r.vel[0]) * 0.5;
    let v2 = (l.vel[1] + r.vel[1]) * 0.5;
    let p_avg = (l.p + r.p) * 0.5;
    let vsq = (l.vel[0] * r.vel[0] + l.vel[1] * r.vel[1]) * 0.5;
    let d = dir.index();
    let vn_avg = if d == 0 { v1 } else { v2 };
    let f1 = rho_mean * vn_avg;
    out[0] = f1;
    out[1] = f1 * v1;
    out[2] = f1 * v2;
    out[1 + d] += p_avg;
    out[3] = f1 * (vsq + inv_rho_p_mean / (g - 1.0)) + (l.p * r.vel[d] + r.p * l.vel[d]) * 0.5;
}
