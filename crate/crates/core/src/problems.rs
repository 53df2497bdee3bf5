//! Initial conditions and exact solutions of the reference experiments.

use std::f64::consts::PI;

use crate::physics::Euler;

/// Wraps `x` into `[lo, lo + len)`.
pub fn wrap(x: f64, lo: f64, len: f64) -> f64 {
    lo + (x - lo).rem_euclid(len)
}

/// Gaussian pulse centred at 0.5 of width 0.08.
pub fn gaussian(x: f64) -> f64 {
    (-0.5 * ((x - 0.5) / 0.08).powi(2)).exp()
}

/// Exact linear-convection solution of the Gaussian on the periodic `[0, 1]`.
///
/// Periodic images are summed so the exact solution stays smooth across the
/// wrap point even though the tails are tiny there.
pub fn gaussian_exact(x: f64, t: f64, a: f64) -> f64 {
    let xi = wrap(x - a * t, 0.0, 1.0);
    (-2..=2).map(|k| gaussian(xi + k as f64)).sum()
}

/// `sin(2 pi x) + beta`, positive for `beta > 1`.
pub fn burgers_sine(x: f64, beta: f64) -> f64 {
    (2.0 * PI * x).sin() + beta
}

/// Breaking time of [`burgers_sine`]: `1 / (2 pi)` independent of `beta`.
pub fn burgers_breaking_time() -> f64 {
    1.0 / (2.0 * PI)
}

/// Near-vacuum density wave on `[-1, 1]`: `rho = 1 + 0.98 sin(2 pi x)`,
/// `v = 0.1`, `p = 20`. The exact solution is pure advection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityWave {
    pub amplitude: f64,
    pub velocity: f64,
    pub pressure: f64,
}

impl Default for DensityWave {
    fn default() -> Self {
        DensityWave {
            amplitude: 0.98,
            velocity: 0.1,
            pressure: 20.0,
        }
    }
}

impl DensityWave {
    pub const DOMAIN: [f64; 2] = [-1.0, 1.0];

    pub fn state(&self, euler: &Euler, x: f64, t: f64, u: &mut [f64]) {
        let rho = 1.0 + self.amplitude * (2.0 * PI * (x - self.velocity * t)).sin();
        euler.conservative(rho, [self.velocity, 0.0], self.pressure, u);
    }
}

/// Isentropic vortex advected in `x` at Mach `mach` on a periodic square.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsentropicVortex {
    pub mach: f64,
    pub beta: f64,
    pub radius: f64,
    /// Lower corner and side length of the periodic square.
    pub lo: f64,
    pub side: f64,
}

impl Default for IsentropicVortex {
    fn default() -> Self {
        IsentropicVortex {
            mach: 0.5,
            beta: 0.2,
            radius: 0.5,
            lo: -5.0,
            side: 10.0,
        }
    }
}

impl IsentropicVortex {
    /// Time for the vortex to cross the domain once.
    pub fn period(&self) -> f64 {
        self.side / self.mach
    }

    pub fn state(&self, euler: &Euler, x: f64, y: f64, t: f64, u: &mut [f64]) {
        let g = euler.gamma;
        let xs = wrap(x - self.mach * t, self.lo, self.side) / self.radius;
        let ys = wrap(y, self.lo, self.side) / self.radius;
        let r2 = xs * xs + ys * ys;
        let ex = (-0.5 * r2).exp();
        let vx = self.mach * (1.0 - self.beta * ys * ex);
        let vy = self.mach * self.beta * xs * ex;
        let rho = (1.0 - 0.5 * (self.mach * self.beta).powi(2) * (g - 1.0) * (-r2).exp())
            .powf(1.0 / (g - 1.0));
        let p = rho.powf(g) / g;
        euler.conservative(rho, [vx, vy], p, u);
    }
}

/// Kelvin-Helmholtz shear layer on `[-1, 1]^2`.
pub fn kelvin_helmholtz(euler: &Euler, x: f64, y: f64, u: &mut [f64]) {
    let b = (15.0 * y + 7.5).tanh() - (15.0 * y - 7.5).tanh();
    let rho = 0.5 + 0.75 * b;
    let vel = [0.5 * b - 1.0, 0.1 * (2.0 * PI * x).sin()];
    euler.conservative(rho, vel, 1.0, u);
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gaussian_is_periodic_in_time() {
        for &x in &[0.0, 0.3, 0.5, 0.77] {
            assert!((gaussian_exact(x, 1.0, 1.0) - gaussian_exact(x, 0.0, 1.0)).abs() < 1e-14);
        }
        assert!((gaussian(0.5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn vortex_far_field_is_free_stream() {
        let e = Euler::new(1.4, 2);
        let v = IsentropicVortex::default();
        let mut u = [0.0; 4];
        v.state(&e, -4.9, 4.9, 0.0, &mut u);
        assert!((u[0] - 1.0).abs() < 1e-12);
        assert!((u[1] - 0.5).abs() < 1e-12);
        assert_eq!(v.period(), 20.0);
    }

    #[test]
    fn khi_is_admissible() {
        let e = Euler::new(1.4, 2);
        let mut u = [0.0; 4];
        for i in 0..21 {
            let y = -1.0 + 0.1 * i as f64;
            kelvin_helmholtz(&e, 0.3, y, &mut u);
            assert!(e.is_admissible(&u));
        }
    }
}
