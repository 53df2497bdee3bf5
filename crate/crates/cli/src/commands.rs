//! Experiment drivers behind each subcommand.

use nalgebra::DMatrix;
use thiserror::Error;

use sbpdiss::dissipation::DissipationOperator;
use sbpdiss::operators::{build_nodal_distribution, build_sbp_operator, build_upwind_pu2_block, SbpOperator};
use sbpdiss::physics::Euler;
use sbpdiss::problems::{
    burgers_sine, gaussian_exact, kelvin_helmholtz, DensityWave, IsentropicVortex,
};
use sbpdiss::semidisc::{
    BlockOperator, Burgers, Functionals, Law, LinearAdvection, SemiDiscretization, SemidiscError,
};
use sbpdiss::solver::{fit_rate, h_norm_error, integrate, run_convergence, spectrum, Rhs};

use crate::config::{Command, ExperimentConfig, FamilyId, Pde};
use crate::output::{Cell, ExperimentResult, MatrixDump, Table};
use crate::verify;

#[derive(Debug, Error)]
pub enum RunError {
    /// The configuration passed validation but describes an unsupported setup.
    #[error("unsupported setup: {0}")]
    Setup(String),
    /// An error while running.
    #[error("runtime failure: {0}")]
    Runtime(String),
}

impl From<SemidiscError> for RunError {
    fn from(e: SemidiscError) -> Self {
        match e {
            SemidiscError::NonAdmissibleState { .. } => RunError::Runtime(e.to_string()),
            other => RunError::Setup(other.to_string()),
        }
    }
}

fn runtime(e: impl std::fmt::Display) -> RunError {
    RunError::Runtime(e.to_string())
}

pub struct Outcome {
    pub result: ExperimentResult,
    /// False when `verify` found a violated invariant.
    pub passed: bool,
}

pub fn run_command(cfg: &ExperimentConfig) -> Result<Outcome, RunError> {
    let mut result = ExperimentResult::default();
    let passed = match cfg.command {
        Command::Verify => verify::run(cfg, &mut result)?,
        Command::Spectra => spectra(cfg, &mut result)?,
        Command::Convergence => convergence(cfg, &mut result)?,
        Command::Run1d => run1d(cfg, &mut result)?,
        Command::Vortex => vortex(cfg, &mut result)?,
        Command::KhiDemo => khi_demo(cfg, &mut result)?,
        Command::DumpOperator => dump_operator(cfg, &mut result)?,
        Command::DumpDissipation => dump_dissipation(cfg, &mut result)?,
    };
    Ok(Outcome { result, passed })
}

/// SBP operator of `n` nodes spanning `length`.
fn sbp_op(cfg: &ExperimentConfig, n: usize, length: f64) -> Result<SbpOperator, RunError> {
    let family = cfg.family.sbp().ok_or_else(|| RunError::Setup("the upwind operator has no SBP form".into()))?;
    let dist = build_nodal_distribution(family, cfg.p, n).map_err(|e| RunError::Setup(e.to_string()))?;
    build_sbp_operator(&dist, length / (n - 1) as f64).map_err(|e| RunError::Setup(e.to_string()))
}

fn block_op(cfg: &ExperimentConfig, n: usize, length: f64) -> Result<BlockOperator, RunError> {
    match cfg.family {
        FamilyId::Upwind => Ok(build_upwind_pu2_block().scaled(length).into()),
        _ => Ok(sbp_op(cfg, n, length)?.into()),
    }
}

fn domain_1d(pde: Pde) -> (f64, f64) {
    match pde {
        Pde::Euler => (DensityWave::DOMAIN[0], DensityWave::DOMAIN[1] - DensityWave::DOMAIN[0]),
        _ => (0.0, 1.0),
    }
}

/// A 1D semi-discretization of any of the supported laws.
enum Sd1 {
    Advection(SemiDiscretization<LinearAdvection>),
    Burgers(SemiDiscretization<Burgers>),
    Euler(SemiDiscretization<Euler>),
}

macro_rules! each {
    ($s:expr, $sd:ident => $body:expr) => {
        match $s {
            Sd1::Advection($sd) => $body,
            Sd1::Burgers($sd) => $body,
            Sd1::Euler($sd) => $body,
        }
    };
}

impl Sd1 {
    /// `blocks` blocks of `n` nodes over the problem's domain.
    fn new(cfg: &ExperimentConfig, n: usize, blocks: usize) -> Result<Self, RunError> {
        let (x0, len) = domain_1d(cfg.pde);
        let op = block_op(cfg, n, len / blocks as f64)?;
        let (scheme, sat, d) = (cfg.scheme, cfg.sat, cfg.dissipation);
        Ok(match cfg.pde {
            Pde::Advection => Sd1::Advection(SemiDiscretization::new_1d(
                LinearAdvection::new_1d(cfg.a),
                op,
                blocks,
                x0,
                scheme,
                sat,
                d,
            )?),
            Pde::Burgers => Sd1::Burgers(SemiDiscretization::new_1d(Burgers, op, blocks, x0, scheme, sat, d)?),
            Pde::Euler => Sd1::Euler(SemiDiscretization::new_1d(Euler::new(cfg.gamma, 1), op, blocks, x0, scheme, sat, d)?),
        })
    }

    fn rhs(&self) -> &dyn Rhs {
        each!(self, sd => sd as &dyn Rhs)
    }

    fn nvar(&self) -> usize {
        each!(self, sd => sd.law().nvar())
    }

    fn weights(&self) -> Vec<f64> {
        each!(self, sd => sd.weights())
    }

    fn functionals(&self, u: &[f64]) -> Functionals {
        each!(self, sd => sd.evaluate_functionals(u))
    }

    /// Exact solution where one is known; the initial state at `t = 0`.
    fn exact(&self, cfg: &ExperimentConfig, t: f64) -> Option<Vec<f64>> {
        match self {
            Sd1::Advection(sd) => Some(sd.project(|x, _, u| u[0] = gaussian_exact(x, t, cfg.a))),
            Sd1::Burgers(sd) => (t == 0.0).then(|| sd.project(|x, _, u| u[0] = burgers_sine(x, cfg.beta))),
            Sd1::Euler(sd) => {
                let dw = DensityWave::default();
                Some(sd.project(|x, _, u| dw.state(sd.law(), x, t, u)))
            }
        }
    }
}

fn spectra(cfg: &ExperimentConfig, res: &mut ExperimentResult) -> Result<bool, RunError> {
    let sd = Sd1::new(cfg, cfg.n, cfg.blocks)?;
    let u = sd.exact(cfg, 0.0).expect("initial state");
    let rep = spectrum(sd.rhs(), 0.0, &u).map_err(runtime)?;
    let mut t = Table::new("eigenvalues", &["index", "re", "im"]);
    for (i, z) in rep.eigenvalues.iter().enumerate() {
        t.push(vec![i.into(), z.re.into(), z.im.into()]);
    }
    res.tables.push(t);
    let mut s = Table::new("spectrum_summary", &["dof", "max_real_part", "spectral_radius", "jacobian"]);
    s.push(vec![u.len().into(), rep.max_real_part.into(), rep.spectral_radius.into(), format!("{:?}", rep.method).into()]);
    res.tables.push(s);
    res.note("max_real_part", rep.max_real_part);
    res.note("spectral_radius", rep.spectral_radius);
    res.note("eps", cfg.eps());
    Ok(true)
}

fn convergence(cfg: &ExperimentConfig, res: &mut ExperimentResult) -> Result<bool, RunError> {
    let spectral = cfg.family.sbp().is_some_and(|f| f.is_spectral());
    let integ = cfg.integrator.build();
    let tf = cfg.integrator.t_final;
    let shape = |g: usize| if spectral { (cfg.p + 1, g) } else { (g, cfg.blocks) };
    let run = |g: usize| -> Result<f64, String> {
        let (n, blocks) = shape(g);
        let sd = Sd1::new(cfg, n, blocks).map_err(|e| e.to_string())?;
        let u0 = sd.exact(cfg, 0.0).expect("initial state");
        let traj = integrate(sd.rhs(), &u0, &integ, &[], &mut |_, _| {});
        if let Some(c) = traj.crash {
            return Err(format!("grid {g} crashed at t = {}: {:?}", c.time, c.cause));
        }
        let exact = sd.exact(cfg, tf).expect("exact solution");
        Ok(h_norm_error(&sd.weights(), &traj.u, &exact))
    };
    let rep = run_convergence(&cfg.grids, run).map_err(RunError::Runtime)?;
    let mut t = Table::new("convergence", &["grid", "dof", "error"]);
    for (&g, &e) in cfg.grids.iter().zip(&rep.errors) {
        let (n, blocks) = shape(g);
        t.push(vec![g.into(), (n * blocks).into(), e.into()]);
    }
    res.tables.push(t);
    let mut s = Table::new("rate", &["rate", "fit_residual"]);
    s.push(vec![rep.rate.into(), rep.fit_residual.into()]);
    res.tables.push(s);
    res.note("rate", rep.rate);
    Ok(true)
}

fn run1d(cfg: &ExperimentConfig, res: &mut ExperimentResult) -> Result<bool, RunError> {
    let sd = Sd1::new(cfg, cfg.n, cfg.blocks)?;
    let u0 = sd.exact(cfg, 0.0).expect("initial state");
    let nv = sd.nvar();
    let mut cols = vec!["t", "energy", "entropy"];
    let totals: Vec<String> = (0..nv).map(|v| format!("total_{v}")).collect();
    cols.extend(totals.iter().map(String::as_str));
    cols.push("max_real_part");
    let mut hist = Table::new("history", &cols);
    let mut spectral_error = None;
    let traj = integrate(sd.rhs(), &u0, &cfg.integrator.build(), &cfg.integrator.output_times(), &mut |t, u| {
        let f = sd.functionals(u);
        let mut row: Vec<Cell> = vec![t.into(), f.energy.into(), f.entropy.into()];
        row.extend(f.totals.iter().map(|&v| Cell::from(v)));
        let max_re = if cfg.jacobian_history {
            match spectrum(sd.rhs(), t, u) {
                Ok(r) => Cell::from(r.max_real_part),
                Err(e) => {
                    spectral_error.get_or_insert(e.to_string());
                    Cell::Missing
                }
            }
        } else {
            Cell::Missing
        };
        row.push(max_re);
        hist.push(row);
    });
    if let Some(e) = spectral_error {
        return Err(RunError::Runtime(e));
    }
    res.tables.push(hist);
    let final_error = match (&traj.crash, sd.exact(cfg, traj.t)) {
        (None, Some(ex)) if cfg.pde != Pde::Burgers => Some(h_norm_error(&sd.weights(), &traj.u, &ex)),
        _ => None,
    };
    let mut s = Table::new(
        "run_summary",
        &["final_time", "crash_time", "crash_cause", "accepted", "rejected", "rhs_evals", "final_error"],
    );
    s.push(vec![
        traj.t.into(),
        traj.crash.as_ref().map(|c| c.time).into(),
        traj.crash.as_ref().map(|c| format!("{:?}", c.cause)).into(),
        traj.accepted.into(),
        traj.rejected.into(),
        traj.rhs_evals.into(),
        final_error.into(),
    ]);
    res.tables.push(s);
    res.note("crash_time", traj.crash.as_ref().map(|c| c.time));
    res.note("final_time", traj.t);
    Ok(true)
}

/// Square periodic 2D Euler discretization with `grid` nodes (CSBP) or
/// blocks (elements) per direction.
fn euler_2d(cfg: &ExperimentConfig, grid: usize, lo: f64, side: f64) -> Result<SemiDiscretization<Euler>, RunError> {
    let spectral = cfg.family.sbp().is_some_and(|f| f.is_spectral());
    let (n, blocks) = if spectral { (cfg.p + 1, grid) } else { (grid, cfg.blocks) };
    let op = block_op(cfg, n, side / blocks as f64)?;
    Ok(SemiDiscretization::new_2d(
        Euler::new(cfg.gamma, 2),
        op.clone(),
        op,
        [blocks, blocks],
        [lo, lo],
        cfg.scheme,
        cfg.sat,
        cfg.dissipation,
    )?)
}

fn vortex(cfg: &ExperimentConfig, res: &mut ExperimentResult) -> Result<bool, RunError> {
    let v = IsentropicVortex {
        mach: cfg.mach,
        beta: cfg.beta,
        radius: cfg.radius,
        ..IsentropicVortex::default()
    };
    let integ = cfg.integrator.build();
    let tf = cfg.integrator.t_final;
    let runs: Vec<Result<(usize, [f64; 3], Option<f64>), RunError>> = {
        use rayon::prelude::*;
        cfg.grids
            .par_iter()
            .map(|&g| {
                let sd = euler_2d(cfg, g, v.lo, v.side)?;
                let e = *sd.law();
                let u0 = sd.project(|x, y, u| v.state(&e, x, y, 0.0, u));
                let traj = integrate(&sd, &u0, &integ, &[], &mut |_, _| {});
                if let Some(c) = traj.crash {
                    return Ok((u0.len(), [f64::NAN; 3], Some(c.time)));
                }
                let exact = sd.project(|x, y, u| v.state(&e, x, y, tf, u));
                let w = sd.weights();
                let field = |f: &dyn Fn(&[f64]) -> f64, u: &[f64]| u.chunks(4).map(f).collect::<Vec<f64>>();
                let rho = |u: &[f64]| u[0];
                let p = |u: &[f64]| e.pressure(u);
                let s = |u: &[f64]| e.entropy(u);
                let err = |f: &dyn Fn(&[f64]) -> f64| h_norm_error(&w, &field(f, &traj.u), &field(f, &exact));
                Ok((u0.len(), [err(&rho), err(&p), err(&s)], None))
            })
            .collect()
    };
    let mut t = Table::new("vortex", &["grid", "dof", "density_error", "pressure_error", "entropy_error", "crash_time"]);
    let mut ok_grids = Vec::new();
    let mut errs: [Vec<f64>; 3] = Default::default();
    for (&g, r) in cfg.grids.iter().zip(runs) {
        let (dof, e, crash) = r?;
        t.push(vec![g.into(), dof.into(), e[0].into(), e[1].into(), e[2].into(), crash.into()]);
        if crash.is_none() {
            ok_grids.push(g as f64);
            for k in 0..3 {
                errs[k].push(e[k]);
            }
        }
    }
    res.tables.push(t);
    let mut r = Table::new("vortex_rates", &["quantity", "rate"]);
    for (k, name) in ["density", "pressure", "entropy"].iter().enumerate() {
        let rate = (ok_grids.len() >= 2).then(|| fit_rate(&ok_grids, &errs[k]).0);
        r.push(vec![(*name).into(), rate.into()]);
        res.note(&format!("{name}_rate"), rate);
    }
    res.tables.push(r);
    Ok(true)
}

fn khi_demo(cfg: &ExperimentConfig, res: &mut ExperimentResult) -> Result<bool, RunError> {
    let sd = euler_2d(cfg, cfg.n, -1.0, 2.0)?;
    let e = *sd.law();
    let u0 = sd.project(|x, y, u| kelvin_helmholtz(&e, x, y, u));
    let mut hist = Table::new("khi_history", &["t", "entropy", "energy"]);
    let traj = integrate(&sd, &u0, &cfg.integrator.build(), &cfg.integrator.output_times(), &mut |t, u| {
        let f = sd.evaluate_functionals(u);
        hist.push(vec![t.into(), f.entropy.into(), f.energy.into()]);
    });
    res.tables.push(hist);
    let mut s = Table::new("khi_summary", &["final_time", "crash_time", "crash_cause", "accepted"]);
    s.push(vec![
        traj.t.into(),
        traj.crash.as_ref().map(|c| c.time).into(),
        traj.crash.as_ref().map(|c| format!("{:?}", c.cause)).into(),
        traj.accepted.into(),
    ]);
    res.tables.push(s);
    res.note("crash_time", traj.crash.as_ref().map(|c| c.time));
    Ok(true)
}

fn dense(name: &str, m: &DMatrix<f64>) -> MatrixDump {
    MatrixDump::from_fn(name, m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn diag(name: &str, d: &[f64]) -> MatrixDump {
    MatrixDump::from_fn(name, d.len(), d.len(), |i, j| if i == j { d[i] } else { 0.0 })
}

/// Operators on unit spacing (`dx = 1`).
fn dump_operator(cfg: &ExperimentConfig, res: &mut ExperimentResult) -> Result<bool, RunError> {
    if cfg.family == FamilyId::Upwind {
        let up = build_upwind_pu2_block();
        res.matrices.push(dense("operator_Dplus", up.d_plus()));
        res.matrices.push(dense("operator_Dminus", up.d_minus()));
        res.matrices.push(diag("operator_H", up.h()));
        res.matrices.push(dense("operator_S", &up.s()));
        return Ok(true);
    }
    let op = sbp_op(cfg, cfg.n, (cfg.n - 1) as f64)?;
    res.matrices.push(dense("operator_D", op.d()));
    res.matrices.push(dense("operator_Q", op.q()));
    res.matrices.push(diag("operator_H", op.h()));
    res.matrices.push(dense("operator_E", op.e()));
    let c = op.check();
    res.note("sbp_residual", c.sbp);
    res.note("accuracy_residual", c.accuracy);
    Ok(true)
}

fn dump_dissipation(cfg: &ExperimentConfig, res: &mut ExperimentResult) -> Result<bool, RunError> {
    let op = sbp_op(cfg, cfg.n, (cfg.n - 1) as f64)?;
    let d = cfg.dissipation.expect("dump-dissipation always resolves a configuration");
    let diss = DissipationOperator::new(&op, d).map_err(|e| RunError::Setup(e.to_string()))?;
    res.matrices.push(dense("dissipation_Dtilde", &diss.undivided().matrix()));
    res.matrices.push(diag("dissipation_B", diss.boundary().diag()));
    let a = diss.dense(None).map_err(runtime)?;
    res.matrices.push(dense("dissipation_AD", &a));
    res.note("eps", d.eps);
    res.note("s", d.s);
    Ok(true)
}
