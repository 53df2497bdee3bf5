//! Compressible Euler equations in one or two dimensions.
//!
//! States are `[rho, rho v_x, (rho v_y), e]`. Small fixed arrays of length 4
//! (vectors) and 16 (row-major matrices) hold per-node quantities; only the
//! leading `nvar` entries are meaningful in 1D.

use super::{Direction, PhysicsError};
use crate::Scalar;

pub type V4<S> = [S; 4];
pub type M4<S> = [S; 16];

#[inline]
fn z4<S: Scalar>() -> V4<S> {
    [S::zero(); 4]
}

#[inline]
fn z16<S: Scalar>() -> M4<S> {
    [S::zero(); 16]
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Euler {
    pub gamma: f64,
    pub dim: usize,
}

#[derive(Debug, Clone, Copy)]
pub struct Primitive<S> {
    pub rho: S,
    pub vel: [S; 2],
    pub p: S,
}

/// Eigen-decomposition of the flux Jacobian in one direction.
/// `x` holds the right eigenvectors as columns, `x_inv` its inverse, and
/// `barth` the columns rescaled so that `barth barth^T = du/dw`.
#[derive(Debug, Clone, Copy)]
pub struct EulerEigen<S> {
    pub lambda: V4<S>,
    pub x: M4<S>,
    pub x_inv: M4<S>,
    pub barth: M4<S>,
}

impl Default for Euler {
    fn default() -> Self {
        Euler { gamma: 1.4, dim: 1 }
    }
}

impl Euler {
    pub fn new(gamma: f64, dim: usize) -> Self {
        assert!(dim == 1 || dim == 2, "Euler supports 1D and 2D");
        Euler { gamma, dim }
    }

    pub fn nvar(&self) -> usize {
        self.dim + 2
    }

    /// Index of the energy component.
    fn ie(&self) -> usize {
        self.dim + 1
    }

    pub fn primitive<S: Scalar>(&self, u: &[S]) -> Primitive<S> {
        let rho = u[0];
        let vx = u[1] / rho;
        let vy = if self.dim == 2 { u[2] / rho } else { S::zero() };
        let ke = rho * (vx * vx + vy * vy) * 0.5;
        Primitive {
            rho,
            vel: [vx, vy],
            p: (u[self.ie()] - ke) * (self.gamma - 1.0),
        }
    }

    pub fn pressure<S: Scalar>(&self, u: &[S]) -> S {
        self.primitive(u).p
    }

    pub fn conservative<S: Scalar>(&self, rho: S, vel: [S; 2], p: S, u: &mut [S]) {
        u[0] = rho;
        u[1] = rho * vel[0];
        if self.dim == 2 {
            u[2] = rho * vel[1];
        }
        u[self.ie()] = p / (self.gamma - 1.0) + rho * (vel[0] * vel[0] + vel[1] * vel[1]) * 0.5;
    }

    pub fn is_admissible<S: Scalar>(&self, u: &[S]) -> bool {
        let w = self.primitive(u);
        w.rho.re() > 0.0 && w.p.re() > 0.0 && w.rho.is_finite() && w.p.is_finite()
    }

    pub fn admissible<S: Scalar>(&self, u: &[S]) -> Result<Primitive<S>, PhysicsError> {
        let w = self.primitive(u);
        if w.rho.re() > 0.0 && w.p.re() > 0.0 && w.rho.is_finite() && w.p.is_finite() {
            Ok(w)
        } else {
            Err(PhysicsError::NonAdmissibleState {
                rho: w.rho.re(),
                p: w.p.re(),
            })
        }
    }

    pub fn sound_speed<S: Scalar>(&self, w: &Primitive<S>) -> S {
        (w.p * self.gamma / w.rho).sqrt()
    }

    /// `|v_n| + c`.
    pub fn max_wave_speed<S: Scalar>(&self, u: &[S], dir: Direction) -> S {
        let w = self.primitive(u);
        w.vel[dir.index()].abs_a() + self.sound_speed(&w)
    }

    pub fn flux<S: Scalar>(&self, u: &[S], dir: Direction, f: &mut [S]) {
        let w = self.primitive(u);
        let vn = w.vel[dir.index()];
        let m = u[0] * vn;
        f[0] = m;
        f[1] = u[1] * vn;
        if self.dim == 2 {
            f[2] = u[2] * vn;
        }
        f[1 + dir.index()] += w.p;
        f[self.ie()] = (u[self.ie()] + w.p) * vn;
    }

    /// Physical entropy `s = ln(p / rho^gamma)`.
    fn thermo_entropy<S: Scalar>(&self, w: &Primitive<S>) -> S {
        w.p.ln() - w.rho.ln() * self.gamma
    }

    /// Mathematical entropy `S = -rho s / (gamma - 1)`.
    pub fn entropy<S: Scalar>(&self, u: &[S]) -> S {
        let w = self.primitive(u);
        -(w.rho * self.thermo_entropy(&w)) / (self.gamma - 1.0)
    }

    /// Entropy flux `F = v_n S`.
    pub fn entropy_flux<S: Scalar>(&self, u: &[S], dir: Direction) -> S {
        let w = self.primitive(u);
        self.entropy(u) * w.vel[dir.index()]
    }

    /// Flux potential `psi = w . f - F = rho v_n`.
    pub fn flux_potential<S: Scalar>(&self, u: &[S], dir: Direction) -> S {
        u[1 + dir.index()]
    }

    pub fn entropy_variables<S: Scalar>(&self, u: &[S], out: &mut [S]) -> Result<(), PhysicsError> {
        let w = self.admissible(u)?;
        let g = self.gamma;
        let s = self.thermo_entropy(&w);
        let beta = w.rho / w.p;
        let v2 = w.vel[0] * w.vel[0] + w.vel[1] * w.vel[1];
        out[0] = (-s + g) / (g - 1.0) - beta * v2 * 0.5;
        out[1] = beta * w.vel[0];
        if self.dim == 2 {
            out[2] = beta * w.vel[1];
        }
        out[self.ie()] = -beta;
        Ok(())
    }

    /// Inverse of [`Euler::entropy_variables`].
    pub fn conservative_from_entropy<S: Scalar>(&self, w: &[S], out: &mut [S]) {
        let g = self.gamma;
        let wl = w[self.ie()];
        let theta = -(S::one() / wl);
        let vx = -(w[1] / wl);
        let vy = if self.dim == 2 { -(w[2] / wl) } else { S::zero() };
        let wm2 = w[1] * w[1] + if self.dim == 2 { w[2] * w[2] } else { S::zero() };
        let s = -((w[0] - wm2 * 0.5 / wl) * (g - 1.0)) + g;
        let rho = (theta * (-s).exp()).powf(1.0 / (g - 1.0));
        let p = theta * rho;
        self.conservative(rho, [vx, vy], p, out);
    }

    /// `du/dw`, symmetric positive definite at admissible states.
    pub fn dudw<S: Scalar>(&self, u: &[S]) -> M4<S> {
        let w = self.primitive(u);
        let g = self.gamma;
        let n = self.nvar();
        let rho = w.rho;
        let p = w.p;
        let e = u[self.ie()];
        let h = (e + p) / rho;
        let c2 = p * g / rho;
        let mut m = z16();
        let vel: Vec<S> = w.vel[..self.dim].to_vec();
        let ie = self.ie();
        m[0] = rho;
        for a in 0..self.dim {
            m[1 + a] = rho * vel[a];
            m[(1 + a) * n] = rho * vel[a];
            for b in 0..self.dim {
                let mut v = rho * vel[a] * vel[b];
                if a == b {
                    v += p;
                }
                m[(1 + a) * n + 1 + b] = v;
            }
            m[(1 + a) * n + ie] = rho * vel[a] * h;
            m[ie * n + 1 + a] = rho * vel[a] * h;
        }
        let big_e = rho * h - p;
        m[ie] = big_e;
        m[ie * n] = big_e;
        m[ie * n + ie] = rho * h * h - c2 * p / (g - 1.0);
        m
    }

    /// Analytic flux Jacobian (row-major, `nvar x nvar`).
    pub fn flux_jacobian<S: Scalar>(&self, u: &[S], dir: Direction) -> M4<S> {
        let w = self.primitive(u);
        let g = self.gamma;
        let n = self.nvar();
        let ie = self.ie();
        let d = dir.index();
        let vel = w.vel;
        let vn = vel[d];
        let q2 = vel[0] * vel[0] + vel[1] * vel[1];
        let h = (u[ie] + w.p) / w.rho;
        let phi = q2 * ((g - 1.0) * 0.5);
        let mut a = z16();
        // Mass row.
        a[1 + d] = S::one();
        // Momentum rows.
        for i in 0..self.dim {
            let r = 1 + i;
            a[r * n] = -(vel[i] * vn);
            for j in 0..self.dim {
                let mut v = S::zero();
                if j == d {
                    v += vel[i];
                }
                if i == j {
                    v += vn;
                }
                if i == d {
                    v -= vel[j] * (g - 1.0);
                }
                a[r * n + 1 + j] = v;
            }
            if i == d {
                a[r * n] += phi;
                a[r * n + ie] = S::from_f64(g - 1.0);
            }
        }
        // Energy row.
        a[ie * n] = vn * (phi - h);
        for j in 0..self.dim {
            let mut v = -(vel[j] * vn * (g - 1.0));
            if j == d {
                v += h;
            }
            a[ie * n + 1 + j] = v;
        }
        a[ie * n + ie] = vn * g;
        a
    }

    /// Eigenvectors from velocity, total enthalpy and sound speed.
    fn eigvecs<S: Scalar>(&self, vel: [S; 2], h: S, c: S, dir: Direction) -> (V4<S>, M4<S>, M4<S>) {
        let g = self.gamma;
        let n = self.nvar();
        let ie = self.ie();
        let (nx, ny) = dir.normal();
        let vn = vel[dir.index()];
        let q2 = vel[0] * vel[0] + vel[1] * vel[1];
        let mut lam = z4();
        let mut x = z16();
        let mut xi = z16();
        let b1 = (S::one() / (c * c)) * (g - 1.0);
        let b2 = b1 * q2 * 0.5;
        // Column/row order: v_n - c, v_n, [shear], v_n + c.
        let last = n - 1;
        lam[0] = vn - c;
        lam[1] = vn;
        lam[last] = vn + c;
        let set = |m: &mut M4<S>, r: usize, col: usize, v: S| m[r * n + col] = v;
        // Acoustic and entropy columns.
        set(&mut x, 0, 0, S::one());
        set(&mut x, 0, 1, S::one());
        set(&mut x, 0, last, S::one());
        set(&mut x, 1, 0, vel[0] - c * nx);
        set(&mut x, 1, 1, vel[0]);
        set(&mut x, 1, last, vel[0] + c * nx);
        if self.dim == 2 {
            set(&mut x, 2, 0, vel[1] - c * ny);
            set(&mut x, 2, 1, vel[1]);
            set(&mut x, 2, last, vel[1] + c * ny);
        }
        set(&mut x, ie, 0, h - vn * c);
        set(&mut x, ie, 1, q2 * 0.5);
        set(&mut x, ie, last, h + vn * c);
        // Inverse rows.
        let ic = S::one() / c;
        let half = 0.5;
        set(&mut xi, 0, 0, (b2 + vn * ic) * half);
        set(&mut xi, 0, 1, (-(b1 * vel[0]) - ic * nx) * half);
        set(&mut xi, 1, 0, -b2 + 1.0);
        set(&mut xi, 1, 1, b1 * vel[0]);
        set(&mut xi, last, 0, (b2 - vn * ic) * half);
        set(&mut xi, last, 1, (-(b1 * vel[0]) + ic * nx) * half);
        if self.dim == 2 {
            set(&mut xi, 0, 2, (-(b1 * vel[1]) - ic * ny) * half);
            set(&mut xi, 1, 2, b1 * vel[1]);
            set(&mut xi, last, 2, (-(b1 * vel[1]) + ic * ny) * half);
        }
        set(&mut xi, 0, ie, b1 * half);
        set(&mut xi, 1, ie, -b1);
        set(&mut xi, last, ie, b1 * half);
        if self.dim == 2 {
            // Shear wave with tangent t = (-n_y, n_x).
            let (tx, ty) = (-ny, nx);
            lam[2] = vn;
            set(&mut x, 1, 2, S::from_f64(tx));
            set(&mut x, 2, 2, S::from_f64(ty));
            set(&mut x, ie, 2, vel[0] * tx + vel[1] * ty);
            set(&mut xi, 2, 0, -(vel[0] * tx + vel[1] * ty));
            set(&mut xi, 2, 1, S::from_f64(tx));
            set(&mut xi, 2, 2, S::from_f64(ty));
        }
        (lam, x, xi)
    }

    pub fn eigen<S: Scalar>(&self, u: &[S], dir: Direction) -> EulerEigen<S> {
        let w = self.primitive(u);
        let c = self.sound_speed(&w);
        let h = (u[self.ie()] + w.p) / w.rho;
        let (lambda, x, x_inv) = self.eigvecs(w.vel, h, c, dir);
        let g = self.gamma;
        let n = self.nvar();
        let acoustic = (w.rho / (2.0 * g)).sqrt();
        let mut t = z4();
        t[0] = acoustic;
        t[1] = (w.rho * ((g - 1.0) / g)).sqrt();
        if self.dim == 2 {
            t[2] = w.p.sqrt();
        }
        t[n - 1] = acoustic;
        let mut barth = x;
        for r in 0..n {
            for k in 0..n {
                barth[r * n + k] *= t[k];
            }
        }
        EulerEigen {
            lambda,
            x,
            x_inv,
            barth,
        }
    }

    /// `X |Lambda| X^-1`.
    pub fn abs_jacobian<S: Scalar>(&self, e: &EulerEigen<S>) -> M4<S> {
        let n = self.nvar();
        let mut m = z16();
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::zero();
                for k in 0..n {
                    acc += e.x[i * n + k] * e.lambda[k].abs_a() * e.x_inv[k * n + j];
                }
                m[i * n + j] = acc;
            }
        }
        m
    }

    /// `X |Lambda| X^T` with Barth-scaled eigenvectors.
    pub fn abs_jacobian_entropy<S: Scalar>(&self, e: &EulerEigen<S>) -> M4<S> {
        let n = self.nvar();
        let mut m = z16();
        for i in 0..n {
            for j in 0..n {
                let mut acc = S::zero();
                for k in 0..n {
                    acc += e.barth[i * n + k] * e.lambda[k].abs_a() * e.barth[j * n + k];
                }
                m[i * n + j] = acc;
            }
        }
        m
    }

    /// `|A_Roe| (ur - ul)` using the Roe-averaged eigensystem.
    pub fn roe_dissipation<S: Scalar>(&self, ul: &[S], ur: &[S], dir: Direction, out: &mut [S]) {
        let n = self.nvar();
        let (wl, wr) = (self.primitive(ul), self.primitive(ur));
        let (sl, sr) = (wl.rho.sqrt(), wr.rho.sqrt());
        let den = S::one() / (sl + sr);
        let hl = (ul[self.ie()] + wl.p) / wl.rho;
        let hr = (ur[self.ie()] + wr.p) / wr.rho;
        let vel = [
            (sl * wl.vel[0] + sr * wr.vel[0]) * den,
            (sl * wl.vel[1] + sr * wr.vel[1]) * den,
        ];
        let h = (sl * hl + sr * hr) * den;
        let q2 = vel[0] * vel[0] + vel[1] * vel[1];
        let c = ((h - q2 * 0.5) * (self.gamma - 1.0)).sqrt();
        let (lam, x, xi) = self.eigvecs(vel, h, c, dir);
        let mut alpha = z4();
        for k in 0..n {
            let mut acc = S::zero();
            for j in 0..n {
                acc += xi[k * n + j] * (ur[j] - ul[j]);
            }
            alpha[k] = acc * lam[k].abs_a();
        }
        for i in 0..n {
            out[i] = (0..n).map(|k| x[i * n + k] * alpha[k]).sum();
        }
    }

    /// `X |Lambda| X^T (wr - wl)` evaluated at the arithmetic-mean state.
    pub fn entropy_dissipation<S: Scalar>(
        &self,
        ul: &[S],
        ur: &[S],
        dir: Direction,
        out: &mut [S],
    ) -> Result<(), PhysicsError> {
        let n = self.nvar();
        let mut wl = z4();
        let mut wr = z4();
        self.entropy_variables(ul, &mut wl)?;
        self.entropy_variables(ur, &mut wr)?;
        let mut um = z4();
        for i in 0..n {
            um[i] = (ul[i] + ur[i]) * 0.5;
        }
        let e = self.eigen(&um[..n], dir);
        let m = self.abs_jacobian_entropy(&e);
        for i in 0..n {
            out[i] = (0..n).map(|j| m[i * n + j] * (wr[j] - wl[j])).sum();
        }
        Ok(())
    }

    /// Steger-Warming splitting of the 1D flux.
    pub fn steger_warming<S: Scalar>(&self, u: &[S], fp: &mut [S], fm: &mut [S]) {
        assert_eq!(self.dim, 1, "Steger-Warming implemented for 1D");
        let w = self.primitive(u);
        let g = self.gamma;
        let c = self.sound_speed(&w);
        let v = w.vel[0];
        let h = (u[2] + w.p) / w.rho;
        let lam = [v - c, v, v + c];
        let scale = w.rho / (2.0 * g);
        for (sign, out) in [(1.0, &mut *fp), (-1.0, &mut *fm)] {
            let l: Vec<S> = lam.iter().map(|&x| (x + x.abs_a() * sign) * 0.5).collect();
            out[0] = scale * (l[0] + l[1] * (2.0 * (g - 1.0)) + l[2]);
            out[1] = scale * ((v - c) * l[0] + v * l[1] * (2.0 * (g - 1.0)) + (v + c) * l[2]);
            out[2] = scale * ((h - v * c) * l[0] + v * v * l[1] * (g - 1.0) + (h + v * c) * l[2]);
        }
    }
}

/// Flux, Jacobian and eigensystem at one state, in `f64`.
#[derive(Debug, Clone)]
pub struct FluxJacobian {
    pub flux: Vec<f64>,
    pub jacobian: Vec<f64>,
    pub eigenvalues: Vec<f64>,
    pub x: Vec<f64>,
    pub x_inv: Vec<f64>,
    pub x_barth: Vec<f64>,
}

pub fn euler_flux_and_jacobian(
    euler: &Euler,
    u: &[f64],
    dir: Direction,
) -> Result<FluxJacobian, PhysicsError> {
    euler.admissible(u)?;
    let n = euler.nvar();
    let mut flux = vec![0.0; n];
    euler.flux(u, dir, &mut flux);
    let a = euler.flux_jacobian(u, dir);
    let e = euler.eigen(u, dir);
    Ok(FluxJacobian {
        flux,
        jacobian: a[..n * n].to_vec(),
        eigenvalues: e.lambda[..n].to_vec(),
        x: e.x[..n * n].to_vec(),
        x_inv: e.x_inv[..n * n].to_vec(),
        x_barth: e.barth[..n * n].to_vec(),
    })
}
