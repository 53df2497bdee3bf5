//! Conservation laws seen by the residual engine.

use crate::dissipation::{system_block, CoefficientMode};
use crate::physics::two_point::{chandrashekar_unchecked, ranocha_unchecked};
use crate::physics::{burgers_flux_split, Direction, Euler, PhysicsError};
use crate::Scalar;

/// Everything the line engine needs from a PDE.
pub trait Law: Send + Sync {
    fn name(&self) -> &'static str;
    fn nvar(&self) -> usize;
    /// Spatial dimensions the law is defined in.
    fn dim(&self) -> usize;
    fn flux<S: Scalar>(&self, u: &[S], dir: Direction, f: &mut [S]);
    /// Symmetric, consistent, entropy-conservative two-point flux.
    fn ec_flux<S: Scalar>(&self, ul: &[S], ur: &[S], dir: Direction, f: &mut [S]);
    fn max_wave_speed<S: Scalar>(&self, u: &[S], dir: Direction) -> S;
    /// Flux-vector splitting `f = f+ + f-`, if the law has one.
    fn flux_split<S: Scalar>(&self, u: &[S], dir: Direction, fp: &mut [S], fm: &mut [S]) -> bool;
    /// `|A_Roe| (ur - ul)`.
    fn roe_dissipation<S: Scalar>(&self, ul: &[S], ur: &[S], dir: Direction, out: &mut [S]);
    /// `X |Lambda| X^T (wr - wl)`, entropy-dissipative by construction.
    fn entropy_dissipation<S: Scalar>(
        &self,
        ul: &[S],
        ur: &[S],
        dir: Direction,
        out: &mut [S],
    ) -> Result<(), PhysicsError>;
    fn entropy_variables<S: Scalar>(&self, u: &[S], w: &mut [S]) -> Result<(), PhysicsError>;
    fn entropy<S: Scalar>(&self, u: &[S]) -> S;
    fn check_state<S: Scalar>(&self, u: &[S]) -> Result<(), PhysicsError>;
    /// Nonnegative scalar dissipation coefficient at one node.
    fn scalar_coefficient<S: Scalar>(&self, u: &[S], dir: Direction) -> S;
    /// Dissipation block at one node for system modes.
    fn system_block<S: Scalar>(
        &self,
        u: &[S],
        mode: CoefficientMode,
        dir: Direction,
        out: &mut [S],
    ) -> Result<(), PhysicsError>;
}

/// `u_t + a . grad u = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearAdvection {
    pub a: [f64; 2],
    pub dim: usize,
}

impl LinearAdvection {
    pub fn new_1d(a: f64) -> Self {
        LinearAdvection { a: [a, 0.0], dim: 1 }
    }
}

macro_rules! scalar_entropy {
    () => {
        fn entropy_variables<S: Scalar>(&self, u: &[S], w: &mut [S]) -> Result<(), PhysicsError> {
            w[0] = u[0];
            Ok(())
        }

        fn entropy<S: Scalar>(&self, u: &[S]) -> S {
            u[0] * u[0] * 0.5
        }

        fn check_state<S: Scalar>(&self, _u: &[S]) -> Result<(), PhysicsError> {
            Ok(())
        }

        fn system_block<S: Scalar>(
            &self,
            u: &[S],
            _mode: CoefficientMode,
            dir: Direction,
            out: &mut [S],
        ) -> Result<(), PhysicsError> {
            out[0] = self.scalar_coefficient(u, dir);
            Ok(())
        }
    };
}

impl Law for LinearAdvection {
    fn name(&self) -> &'static str {
        "linear-advection"
    }
    fn nvar(&self) -> usize {
        1
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn flux<S: Scalar>(&self, u: &[S], dir: Direction, f: &mut [S]) {
        f[0] = u[0] * self.a[dir.index()];
    }
    fn ec_flux<S: Scalar>(&self, ul: &[S], ur: &[S], dir: Direction, f: &mut [S]) {
        f[0] = (ul[0] + ur[0]) * (0.5 * self.a[dir.index()]);
    }
    fn max_wave_speed<S: Scalar>(&self, _u: &[S], dir: Direction) -> S {
        S::from_f64(self.a[dir.index()].abs())
    }
    fn flux_split<S: Scalar>(&self, u: &[S], dir: Direction, fp: &mut [S], fm: &mut [S]) -> bool {
        let a = self.a[dir.index()];
        fp[0] = u[0] * (0.5 * (a + a.abs()));
        fm[0] = u[0] * (0.5 * (a - a.abs()));
        true
    }
    fn roe_dissipation<S: Scalar>(&self, ul: &[S], ur: &[S], dir: Direction, out: &mut [S]) {
        out[0] = (ur[0] - ul[0]) * self.a[dir.index()].abs();
    }
    fn entropy_dissipation<S: Scalar>(
        &self,
        ul: &[S],
        ur: &[S],
        dir: Direction,
        out: &mut [S],
    ) -> Result<(), PhysicsError> {
        self.roe_dissipation(ul, ur, dir, out);
        Ok(())
    }
    fn scalar_coefficient<S: Scalar>(&self, _u: &[S], dir: Direction) -> S {
        S::from_f64(self.a[dir.index()].abs())
    }
    scalar_entropy!();
}

/// Inviscid Burgers, `u_t + (u^2/2)_x = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Burgers;

impl Law for Burgers {
    fn name(&self) -> &'static str {
        "burgers"
    }
    fn nvar(&self) -> usize {
        1
    }
    fn dim(&self) -> usize {
        1
    }
    fn flux<S: Scalar>(&self, u: &[S], _dir: Direction, f: &mut [S]) {
        f[0] = u[0] * u[0] * 0.5;
    }
    /// Gives the split form `(D u^2 + u D u) / 3` in Hadamard form.
    fn ec_flux<S: Scalar>(&self, ul: &[S], ur: &[S], _dir: Direction, f: &mut [S]) {
        let (a, b) = (ul[0], ur[0]);
        f[0] = (a * a + a * b + b * b) / 6.0;
    }
    fn max_wave_speed<S: Scalar>(&self, u: &[S], _dir: Direction) -> S {
        u[0].abs_a()
    }
    fn flux_split<S: Scalar>(&self, u: &[S], _dir: Direction, fp: &mut [S], fm: &mut [S]) -> bool {
        let (p, m) = burgers_flux_split(u[0]);
        fp[0] = p;
        fm[0] = m;
        true
    }
    fn roe_dissipation<S: Scalar>(&self, ul: &[S], ur: &[S], _dir: Direction, out: &mut [S]) {
        out[0] = (ur[0] - ul[0]) * ((ul[0] + ur[0]) * 0.5).abs_a();
    }
    fn entropy_dissipation<S: Scalar>(
        &self,
        ul: &[S],
        ur: &[S],
        dir: Direction,
        out: &mut [S],
    ) -> Result<(), PhysicsError> {
        self.roe_dissipation(ul, ur, dir, out);
        Ok(())
    }
    fn scalar_coefficient<S: Scalar>(&self, u: &[S], _dir: Direction) -> S {
        u[0].abs_a()
    }
    scalar_entropy!();
}

impl Law for Euler {
    fn name(&self) -> &'static str {
        "euler"
    }
    fn nvar(&self) -> usize {
        Euler::nvar(self)
    }
    fn dim(&self) -> usize {
        self.dim
    }
    fn flux<S: Scalar>(&self, u: &[S], dir: Direction, f: &mut [S]) {
        Euler::flux(self, u, dir, f);
    }
    fn ec_flux<S: Scalar>(&self, ul: &[S], ur: &[S], dir: Direction, f: &mut [S]) {
        if self.dim == 1 {
            chandrashekar_unchecked(self, ul, ur, f);
        } else {
            ranocha_unchecked(self, ul, ur, dir, f);
        }
    }
    fn max_wave_speed<S: Scalar>(&self, u: &[S], dir: Direction) -> S {
        Euler::max_wave_speed(self, u, dir)
    }
    fn flux_split<S: Scalar>(&self, u: &[S], _dir: Direction, fp: &mut [S], fm: &mut [S]) -> bool {
        if self.dim != 1 {
            return false;
        }
        self.steger_warming(u, fp, fm);
        true
    }
    fn roe_dissipation<S: Scalar>(&self, ul: &[S], ur: &[S], dir: Direction, out: &mut [S]) {
        Euler::roe_dissipation(self, ul, ur, dir, out);
    }
    fn entropy_dissipation<S: Scalar>(
        &self,
        ul: &[S],
        ur: &[S],
        dir: Direction,
        out: &mut [S],
    ) -> Result<(), PhysicsError> {
        Euler::entropy_dissipation(self, ul, ur, dir, out)
    }
    fn entropy_variables<S: Scalar>(&self, u: &[S], w: &mut [S]) -> Result<(), PhysicsError> {
        Euler::entropy_variables(self, u, w)
    }
    fn entropy<S: Scalar>(&self, u: &[S]) -> S {
        Euler::entropy(self, u)
    }
    fn check_state<S: Scalar>(&self, u: &[S]) -> Result<(), PhysicsError> {
        self.admissible(u).map(|_| ())
    }
    fn scalar_coefficient<S: Scalar>(&self, u: &[S], dir: Direction) -> S {
        Euler::max_wave_speed(self, u, dir)
    }
    fn system_block<S: Scalar>(
        &self,
        u: &[S],
        mode: CoefficientMode,
        dir: Direction,
        out: &mut [S],
    ) -> Result<(), PhysicsError> {
        system_block(self, u, mode, dir, out)
    }
}
