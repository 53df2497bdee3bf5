//! Explicit Runge-Kutta integration with crash detection.

use serde::{Deserialize, Serialize};

use super::{Rhs, RhsError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Rk4,
    DormandPrince54,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeIntegrator {
    pub method: Method,
    pub rtol: f64,
    pub atol: f64,
    /// First trial step for the adaptive method; estimated when `None`.
    pub dt_init: Option<f64>,
    /// Accepted steps below this size count as a crash.
    pub dt_min: f64,
    /// Fixed step for RK4; takes precedence over `cfl`.
    pub dt: Option<f64>,
    /// RK4 step as a multiple of the system's explicit bound.
    pub cfl: Option<f64>,
    pub t_final: f64,
    pub max_steps: usize,
}

impl TimeIntegrator {
    pub fn dopri(t_final: f64, tol: f64) -> Self {
        TimeIntegrator {
            method: Method::DormandPrince54,
            rtol: tol,
            atol: tol,
            dt_init: None,
            dt_min: 1e-10,
            dt: None,
            cfl: None,
            t_final,
            max_steps: 10_000_000,
        }
    }

    pub fn rk4(t_final: f64, dt: f64) -> Self {
        TimeIntegrator {
            method: Method::Rk4,
            rtol: 0.0,
            atol: 0.0,
            dt_init: None,
            dt_min: 1e-10,
            dt: Some(dt),
            cfl: None,
            t_final,
            max_steps: 10_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CrashCause {
    /// A state lost positivity of density or pressure.
    NonAdmissible(String),
    /// The step size fell below the floor.
    StepTooSmall(f64),
    /// Non-finite values without an admissibility check.
    NonFinite,
    /// The step budget ran out.
    StepLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrashInfo {
    pub time: f64,
    pub cause: CrashCause,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Time of the last accepted state.
    pub t: f64,
    pub u: Vec<f64>,
    pub crash: Option<CrashInfo>,
    pub accepted: usize,
    pub rejected: usize,
    pub rhs_evals: usize,
}

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 5.0;
// PI controller exponents for a fifth-order pair.
const BETA: f64 = 0.04;
const ALPHA: f64 = 0.2 - 0.75 * BETA;

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

struct Outputs<'a> {
    times: Vec<f64>,
    next: usize,
    observer: &'a mut dyn FnMut(f64, &[f64]),
}

impl Outputs<'_> {
    fn target(&self, t_final: f64) -> f64 {
        self.times.get(self.next).copied().unwrap_or(t_final).min(t_final)
    }

    fn emit(&mut self, t: f64, u: &[f64]) {
        while self.next < self.times.len() && self.times[self.next] <= t * (1.0 + 1e-14) + 1e-300 {
            (self.observer)(self.times[self.next], u);
            self.next += 1;
        }
    }
}

/// Advances `u0` from `t = 0` to `t_final`, calling `observer` at each of
/// the (sorted) `outputs` times that is reached. Crashes are reported in the
/// trajectory rather than as errors.
pub fn integrate(
    rhs: &dyn Rhs,
    u0: &[f64],
    integ: &TimeIntegrator,
    outputs: &[f64],
    observer: &mut dyn FnMut(f64, &[f64]),
) -> Trajectory {
    let mut times: Vec<f64> = outputs.iter().cloned().filter(|&t| t <= integ.t_final).collect();
    times.sort_by(f64::total_cmp);
    let mut out = Outputs {
        times,
        next: 0,
        observer,
    };
    out.emit(0.0, u0);
    match integ.method {
        Method::Rk4 => rk4(rhs, u0, integ, &mut out),
        Method::DormandPrince54 => dopri(rhs, u0, integ, &mut out),
    }
}

fn crash_from(e: RhsError) -> CrashCause {
    match e {
        RhsError::NonAdmissibleState(s) => CrashCause::NonAdmissible(s),
        other => CrashCause::NonAdmissible(other.to_string()),
    }
}

fn rk4(rhs: &dyn Rhs, u0: &[f64], integ: &TimeIntegrator, out: &mut Outputs<'_>) -> Trajectory {
    let n = u0.len();
    let mut u = u0.to_vec();
    let mut t = 0.0;
    let mut k = vec![vec![0.0; n]; 4];
    let mut tmp = vec![0.0; n];
    let mut traj = Trajectory {
        t,
        u: Vec::new(),
        crash: None,
        accepted: 0,
        rejected: 0,
        rhs_evals: 0,
    };
    while t < integ.t_final * (1.0 - 1e-15) {
        if traj.accepted >= integ.max_steps {
            traj.crash = Some(CrashInfo { time: t, cause: CrashCause::StepLimit });
            break;
        }
        let base = match (integ.dt, integ.cfl) {
            (Some(dt), _) => dt,
            (None, Some(cfl)) => cfl * rhs.stable_dt(&u).unwrap_or(f64::INFINITY),
            (None, None) => integ.t_final / 100.0,
        };
        let target = out.target(integ.t_final);
        let mut dt = base.min(target - t);
        // Avoid a sliver of a step just before an output time.
        if target - t - dt < 1e-12 * base {
            dt = target - t;
        }
        if !(dt >= integ.dt_min) && target - t > integ.dt_min {
            traj.crash = Some(CrashInfo { time: t, cause: CrashCause::StepTooSmall(dt) });
            break;
        }
        let mut failed = None;
        for s in 0..4 {
            let (ts, fac) = match s {
                0 => (t, 0.0),
                1 | 2 => (t + 0.5 * dt, 0.5 * dt),
                _ => (t + dt, dt),
            };
            for i in 0..n {
                tmp[i] = if s == 0 { u[i] } else { u[i] + fac * k[s - 1][i] };
            }
            traj.rhs_evals += 1;
            if let Err(e) = rhs.eval(ts, &tmp, &mut k[s]) {
                failed = Some(e);
                break;
            }
        }
        if let Some(e) = failed {
            traj.crash = Some(CrashInfo { time: t, cause: crash_from(e) });
            break;
        }
        for i in 0..n {
            u[i] += dt / 6.0 * (k[0][i] + 2.0 * k[1][i] + 2.0 * k[2][i] + k[3][i]);
        }
        t += dt;
        traj.accepted += 1;
        if u.iter().any(|v| !v.is_finite()) {
            traj.crash = Some(CrashInfo { time: t, cause: CrashCause::NonFinite });
            break;
        }
        if let Err(e) = rhs.check_state(&u) {
            traj.crash = Some(CrashInfo { time: t, cause: crash_from(e) });
            break;
        }
        out.emit(t, &u);
    }
    traj.t = t;
    traj.u = u;
    traj
}

fn error_norm(u: &[f64], unew: &[f64], err: &[f64], integ: &TimeIntegrator) -> f64 {
    let n = u.len() as f64;
    let s: f64 = u
        .iter()
        .zip(unew)
        .zip(err)
        .map(|((&a, &b), &e)| {
            let sc = integ.atol + integ.rtol * a.abs().max(b.abs());
            (e / sc).powi(2)
        })
        .sum();
    (s / n).sqrt()
}

fn initial_step(
    rhs: &dyn Rhs,
    u: &[f64],
    f0: &[f64],
    integ: &TimeIntegrator,
    evals: &mut usize,
) -> f64 {
    // Hairer, Norsett & Wanner, Section II.4.
    let sc: Vec<f64> = u.iter().map(|v| integ.atol + integ.rtol * v.abs()).collect();
    let n = u.len() as f64;
    let norm = |x: &[f64]| (x.iter().zip(&sc).map(|(a, s)| (a / s).powi(2)).sum::<f64>() / n).sqrt();
    let d0 = norm(u);
    let d1 = norm(f0);
    let mut h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h0 = h0.min(integ.t_final);
    let u1: Vec<f64> = u.iter().zip(f0).map(|(a, b)| a + h0 * b).collect();
    let mut f1 = vec![0.0; u.len()];
    *evals += 1;
    if rhs.eval(h0, &u1, &mut f1).is_err() {
        return h0 * 0.1;
    }
    let diff: Vec<f64> = f1.iter().zip(f0).map(|(a, b)| a - b).collect();
    let d2 = norm(&diff) / h0;
    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(0.2)
    };
    (100.0 * h0).min(h1).min(integ.t_final)
}

fn dopri(rhs: &dyn Rhs, u0: &[f64], integ: &TimeIntegrator, out: &mut Outputs<'_>) -> Trajectory {
    let n = u0.len();
    let mut u = u0.to_vec();
    let mut t = 0.0;
    let mut traj = Trajectory {
        t,
        u: Vec::new(),
        crash: None,
        accepted: 0,
        rejected: 0,
        rhs_evals: 0,
    };
    let mut k = vec![vec![0.0; n]; 7];
    let mut tmp = vec![0.0; n];
    let mut unew = vec![0.0; n];
    let mut err = vec![0.0; n];
    traj.rhs_evals += 1;
    if let Err(e) = rhs.eval(t, &u, &mut k[0]) {
        traj.crash = Some(CrashInfo { time: t, cause: crash_from(e) });
        traj.u = u;
        return traj;
    }
    let mut h = integ
        .dt_init
        .unwrap_or_else(|| initial_step(rhs, &u, &k[0], integ, &mut traj.rhs_evals));
    let mut err_old: f64 = 1e-4;
    let mut last_rejected = false;
    let mut inadmissible: Option<RhsError> = None;
    while t < integ.t_final * (1.0 - 1e-15) {
        if traj.accepted + traj.rejected >= integ.max_steps {
            traj.crash = Some(CrashInfo { time: t, cause: CrashCause::StepLimit });
            break;
        }
        let target = out.target(integ.t_final);
        let remaining = target - t;
        let mut dt = h.min(remaining);
        if remaining - dt < 1e-12 * remaining.max(1e-300) {
            dt = remaining;
        }
        if dt < integ.dt_min && remaining > integ.dt_min {
            let cause = match inadmissible.take() {
                Some(e) => crash_from(e),
                None => CrashCause::StepTooSmall(dt),
            };
            traj.crash = Some(CrashInfo { time: t, cause });
            break;
        }
        let mut stage_error = None;
        for s in 1..7 {
            for i in 0..n {
                let mut acc = 0.0;
                for (j, kj) in k.iter().enumerate().take(s) {
                    acc += A[s][j] * kj[i];
                }
                tmp[i] = u[i] + dt * acc;
            }
            if s == 6 {
                unew.copy_from_slice(&tmp);
            }
            traj.rhs_evals += 1;
            if let Err(e) = rhs.eval(t + C[s] * dt, &tmp, &mut k[s]) {
                stage_error = Some(e);
                break;
            }
        }
        let en = match &stage_error {
            Some(_) => f64::INFINITY,
            None => {
                for i in 0..n {
                    err[i] = dt * (0..7).map(|s| E[s] * k[s][i]).sum::<f64>();
                }
                error_norm(&u, &unew, &err, integ)
            }
        };
        if en.is_finite() && en <= 1.0 {
            if let Err(e) = rhs.check_state(&unew) {
                traj.crash = Some(CrashInfo { time: t + dt, cause: crash_from(e) });
                break;
            }
            t += dt;
            std::mem::swap(&mut u, &mut unew);
            k.swap(0, 6);
            traj.accepted += 1;
            inadmissible = None;
            let mut fac = SAFETY * en.max(1e-10).powf(-ALPHA) * err_old.powf(BETA);
            fac = fac.clamp(FAC_MIN, FAC_MAX);
            if last_rejected {
                fac = fac.min(1.0);
            }
            // Only a full-size step should steer the controller.
            if dt >= h * (1.0 - 1e-12) || fac < 1.0 {
                h = dt * fac;
            }
            err_old = en.max(1e-4);
            last_rejected = false;
            out.emit(t, &u);
        } else {
            traj.rejected += 1;
            let fac = if en.is_finite() {
                (SAFETY * en.powf(-0.2)).max(FAC_MIN)
            } else {
                0.25
            };
            if let Some(RhsError::NonAdmissibleState(s)) = stage_error {
                inadmissible = Some(RhsError::NonAdmissibleState(s));
            } else if let Some(e) = stage_error {
                traj.crash = Some(CrashInfo { time: t, cause: crash_from(e) });
                break;
            }
            h = dt * fac.min(1.0);
            last_rejected = true;
        }
    }
    traj.t = t;
    traj.u = u;
    traj
}
