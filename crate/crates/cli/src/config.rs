//! Experiment configuration: TOML parsing, validation and default resolution.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use sbpdiss::dissipation::{CoefficientMode, DissipationConfig, VariableSet};
use sbpdiss::operators::{csbp_min_nodes, Family};
use sbpdiss::problems::{burgers_breaking_time, IsentropicVortex};
use sbpdiss::semidisc::{SatKind, Scheme};
use sbpdiss::solver::{Method, TimeIntegrator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("invalid field `{field}`: {reason}")]
    Validation { field: String, reason: String },
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Validation {
        field: field.into(),
        reason: reason.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Spectra,
    Convergence,
    Run1d,
    Vortex,
    KhiDemo,
    DumpOperator,
    DumpDissipation,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Spectra => "spectra",
            Command::Convergence => "convergence",
            Command::Run1d => "run1d",
            Command::Vortex => "vortex",
            Command::KhiDemo => "khi-demo",
            Command::DumpOperator => "dump-operator",
            Command::DumpDissipation => "dump-dissipation",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyId {
    #[serde(alias = "CSBP")]
    Csbp,
    #[serde(alias = "LGL")]
    Lgl,
    #[serde(alias = "LG")]
    Lg,
    Upwind,
}

impl FamilyId {
    pub fn sbp(self) -> Option<Family> {
        match self {
            FamilyId::Csbp => Some(Family::Csbp),
            FamilyId::Lgl => Some(Family::Lgl),
            FamilyId::Lg => Some(Family::Lg),
            FamilyId::Upwind => None,
        }
    }

    fn is_spectral(self) -> bool {
        matches!(self, FamilyId::Lgl | FamilyId::Lg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pde {
    Advection,
    Burgers,
    Euler,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Gaussian,
    BurgersSine,
    DensityWave,
}

/// `eps` is a number or one of the named presets.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum EpsSpec {
    Value(f64),
    Preset(String),
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawIntegrator {
    method: Option<String>,
    tol: Option<f64>,
    dt: Option<f64>,
    cfl: Option<f64>,
    t_final: Option<f64>,
    output_interval: Option<f64>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    command: Option<Command>,
    family: Option<FamilyId>,
    p: Option<usize>,
    #[serde(rename = "N")]
    n: Option<usize>,
    blocks: Option<usize>,
    grids: Option<Vec<usize>>,
    s: Option<usize>,
    eps: Option<EpsSpec>,
    include_b: Option<bool>,
    include_htilde: Option<bool>,
    mode: Option<CoefficientMode>,
    variables: Option<VariableSet>,
    pde: Option<Pde>,
    problem: Option<Problem>,
    scheme: Option<Scheme>,
    sat: Option<SatKind>,
    a: Option<f64>,
    gamma: Option<f64>,
    beta: Option<f64>,
    mach: Option<f64>,
    radius: Option<f64>,
    jacobian_history: Option<bool>,
    seed: Option<u64>,
    integrator: Option<RawIntegrator>,
}

/// Fully resolved integrator settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub method: Method,
    pub tol: f64,
    pub dt: Option<f64>,
    pub cfl: Option<f64>,
    pub t_final: f64,
    pub output_interval: f64,
}

impl IntegratorConfig {
    pub fn build(&self) -> TimeIntegrator {
        let mut t = match self.method {
            Method::DormandPrince54 => TimeIntegrator::dopri(self.t_final, self.tol),
            Method::Rk4 => TimeIntegrator::rk4(self.t_final, self.dt.unwrap_or(0.0)),
        };
        if self.method == Method::Rk4 && self.dt.is_none() {
            t.dt = None;
            t.cfl = self.cfl;
        }
        t
    }

    pub fn output_times(&self) -> Vec<f64> {
        let n = (self.t_final / self.output_interval).round() as usize;
        let mut t: Vec<f64> = (0..=n).map(|k| k as f64 * self.output_interval).collect();
        t.retain(|&v| v <= self.t_final * (1.0 + 1e-12));
        if t.last().is_none_or(|&v| (v - self.t_final).abs() > 1e-12 * self.t_final.max(1.0)) {
            t.push(self.t_final);
        }
        t
    }
}

/// A validated experiment with every default made explicit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub command: Command,
    pub family: FamilyId,
    pub p: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub blocks: usize,
    pub grids: Vec<usize>,
    pub pde: Pde,
    pub problem: Option<Problem>,
    pub scheme: Scheme,
    pub sat: SatKind,
    pub dissipation: Option<DissipationConfig>,
    /// How `eps` was given: a preset name or "value".
    pub eps_source: String,
    pub a: f64,
    pub gamma: f64,
    pub beta: f64,
    pub mach: f64,
    pub radius: f64,
    pub jacobian_history: bool,
    pub seed: u64,
    pub integrator: IntegratorConfig,
}

impl ExperimentConfig {
    /// SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        format!("{:x}", Sha256::digest(json.as_bytes()))
    }

    pub fn eps(&self) -> f64 {
        self.dissipation.map(|d| d.eps).unwrap_or(0.0)
    }
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map(|l| l.chars().count()).unwrap_or(0) + 1;
    (line, column)
}

/// `eps` for a named preset.
pub fn resolve_preset(name: &str, s: usize, p: usize) -> Option<f64> {
    match name {
        "large" => Some(3.125 * 5f64.powi(-(s as i32))),
        "small" => Some(0.625 * 5f64.powi(-(s as i32))),
        "se" => Some(0.1 * 2.25f64.powi(-(p as i32))),
        _ => None,
    }
}

/// Parses and validates a TOML configuration. `cli_command` is the
/// subcommand given on the command line; a `command` key in the file must
/// agree with it.
pub fn parse_config(text: &str, cli_command: Option<Command>) -> Result<ExperimentConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map(|s| line_col(text, s.start)).unwrap_or((0, 0));
        ConfigError::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    resolve(raw, cli_command)
}

fn positive(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be a positive number, got {v}")))
    }
}

fn resolve(raw: RawConfig, cli_command: Option<Command>) -> Result<ExperimentConfig, ConfigError> {
    let command = match (raw.command, cli_command) {
        (Some(a), Some(b)) if a != b => {
            return Err(invalid("command", format!("file says `{}` but `{}` was requested", a.name(), b.name())))
        }
        (Some(a), _) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(invalid("command", "missing")),
    };
    let verify = command == Command::Verify;

    let family = raw.family.unwrap_or(FamilyId::Csbp);
    let p = match (raw.p, family) {
        (_, FamilyId::Upwind) => raw.p.unwrap_or(2),
        (Some(p), _) => p,
        (None, _) if verify => 2,
        (None, _) => return Err(invalid("p", "missing")),
    };
    if p == 0 {
        return Err(invalid("p", "must be at least 1"));
    }
    match family {
        FamilyId::Csbp if p > 4 => return Err(invalid("p", "CSBP operators exist for p = 1..4")),
        FamilyId::Upwind if p != 2 => return Err(invalid("p", "the upwind operator has p = 2")),
        _ => {}
    }

    let pde = match command {
        Command::Vortex | Command::KhiDemo => {
            if raw.pde.is_some_and(|v| v != Pde::Euler) {
                return Err(invalid("pde", "this command runs the Euler equations"));
            }
            Pde::Euler
        }
        Command::Convergence => {
            if raw.pde.is_some_and(|v| v != Pde::Advection) {
                return Err(invalid("pde", "convergence runs linear advection; use `vortex` for Euler"));
            }
            Pde::Advection
        }
        _ => raw.pde.unwrap_or(match raw.problem {
            Some(Problem::BurgersSine) => Pde::Burgers,
            Some(Problem::DensityWave) => Pde::Euler,
            _ => Pde::Advection,
        }),
    };
    let problem = match command {
        Command::Run1d | Command::Spectra => {
            let natural = match pde {
                Pde::Advection => Problem::Gaussian,
                Pde::Burgers => Problem::BurgersSine,
                Pde::Euler => Problem::DensityWave,
            };
            let pr = raw.problem.unwrap_or(natural);
            if pr != natural {
                return Err(invalid("problem", format!("{pr:?} does not belong to {pde:?}")));
            }
            Some(pr)
        }
        _ => None,
    };

    let min_nodes = match family {
        FamilyId::Csbp => csbp_min_nodes(p),
        FamilyId::Upwind => 5,
        _ => p + 1,
    };
    let n = match (raw.n, family) {
        (Some(n), FamilyId::Upwind) if n != 5 => return Err(invalid("N", "the upwind operator has 5 nodes")),
        (Some(n), f) if f.is_spectral() && n != p + 1 => {
            return Err(invalid("N", format!("a degree-{p} element has {} nodes", p + 1)))
        }
        (Some(n), _) => n,
        (None, FamilyId::Csbp) => match command {
            Command::Verify => 20,
            Command::Convergence | Command::Vortex => 0,
            Command::KhiDemo => 32,
            _ => return Err(invalid("N", "missing")),
        },
        (None, _) => min_nodes,
    };
    if n != 0 && n < min_nodes {
        return Err(invalid("N", format!("needs at least {min_nodes} nodes for p = {p}")));
    }
    if command == Command::KhiDemo && n > 64 {
        return Err(invalid("N", "the KHI demo is limited to 64 nodes per direction"));
    }

    let blocks = raw.blocks.unwrap_or(if family.is_spectral() || family == FamilyId::Upwind { 8 } else { 1 });
    if blocks == 0 {
        return Err(invalid("blocks", "must be at least 1"));
    }
    let grids = match command {
        Command::Convergence | Command::Vortex => {
            let g = raw.grids.unwrap_or_else(|| match (command, family.is_spectral()) {
                (Command::Vortex, _) => vec![30, 45, 60],
                (_, true) => vec![8, 12, 16, 24, 32],
                _ => vec![40, 60, 80, 120, 160],
            });
            if g.len() < 2 {
                return Err(invalid("grids", "needs at least two grids"));
            }
            if !family.is_spectral() {
                if let Some(bad) = g.iter().find(|&&v| v < min_nodes) {
                    return Err(invalid("grids", format!("{bad} nodes is below the minimum {min_nodes}")));
                }
            } else if g.contains(&0) {
                return Err(invalid("grids", "block counts must be positive"));
            }
            g
        }
        _ => {
            if raw.grids.is_some() {
                return Err(invalid("grids", format!("not used by `{}`", command.name())));
            }
            Vec::new()
        }
    };
    if family == FamilyId::Upwind && matches!(command, Command::Vortex | Command::KhiDemo | Command::Convergence) {
        return Err(invalid("family", "the upwind operator is only supported in 1D runs"));
    }

    let scheme = raw.scheme.unwrap_or(match (pde, family) {
        (_, FamilyId::Upwind) => Scheme::UpwindFVS,
        (Pde::Burgers, FamilyId::Lg) => Scheme::Central,
        (Pde::Burgers, _) => Scheme::SplitFormBurgers,
        (Pde::Euler, FamilyId::Lg) => Scheme::Central,
        (Pde::Euler, _) if command == Command::Vortex => Scheme::Central,
        (Pde::Euler, _) => Scheme::HadamardEntropyStable,
        (Pde::Advection, _) => Scheme::Central,
    });
    let sat = raw.sat.unwrap_or(match (pde, scheme) {
        (Pde::Advection, _) => SatKind::LaxFriedrichs,
        (Pde::Burgers, _) => SatKind::Rusanov,
        (Pde::Euler, Scheme::HadamardEntropyStable) => SatKind::EntropyDissipativeMatrix,
        (Pde::Euler, _) => SatKind::RoeMatrix,
    });

    let default_s = if family.is_spectral() { p } else { p + 1 };
    let s = raw.s.unwrap_or(default_s);
    if family.is_spectral() && s != p {
        return Err(invalid("s", format!("element dissipation needs s = p = {p}")));
    }
    let (eps, eps_source) = match &raw.eps {
        None => (None, "none".to_string()),
        Some(EpsSpec::Value(v)) => {
            if !(v.is_finite() && *v >= 0.0) {
                return Err(invalid("eps", format!("must be nonnegative, got {v}")));
            }
            (Some(*v), "value".to_string())
        }
        Some(EpsSpec::Preset(name)) => match resolve_preset(name, s, p) {
            Some(v) => (Some(v), name.clone()),
            None => return Err(invalid("eps", format!("unknown preset `{name}` (large, small, se)"))),
        },
    };
    let eps = match (eps, command) {
        (None, Command::DumpDissipation) => Some(1.0),
        (None, Command::Vortex | Command::KhiDemo) => resolve_preset("small", s, p),
        (e, _) => e,
    };
    let dissipation = match eps {
        Some(e) if e > 0.0 || command == Command::DumpDissipation => {
            let mode = raw.mode.unwrap_or(match pde {
                Pde::Euler if scheme == Scheme::HadamardEntropyStable => CoefficientMode::MatrixMatrixBlock,
                Pde::Euler => CoefficientMode::MatrixBlock,
                _ if s % 2 == 1 && pde == Pde::Burgers => CoefficientMode::HalfNodeScalar,
                _ => CoefficientMode::NodalScalar,
            });
            if pde != Pde::Euler && mode.is_block() {
                return Err(invalid("mode", "block modes need a system"));
            }
            let mut d = DissipationConfig::new(s, e).with_mode(mode);
            d.include_b = raw.include_b.unwrap_or(!family.is_spectral());
            d.include_htilde = raw.include_htilde.unwrap_or(false);
            if let Some(v) = raw.variables {
                if v != d.variables {
                    return Err(invalid("variables", format!("{mode:?} acts on {:?} variables", d.variables)));
                }
            }
            Some(d)
        }
        _ => {
            if raw.mode.is_some() || raw.include_b.is_some() || raw.include_htilde.is_some() {
                return Err(invalid("eps", "dissipation options given without a positive eps"));
            }
            None
        }
    };

    let gamma = positive("gamma", raw.gamma.unwrap_or(1.4))?;
    let vortex = IsentropicVortex::default();
    let mach = positive("mach", raw.mach.unwrap_or(vortex.mach))?;
    let radius = positive("radius", raw.radius.unwrap_or(vortex.radius))?;
    let beta = raw.beta.unwrap_or(match command {
        Command::Vortex => vortex.beta,
        _ => 1.5,
    });
    if pde == Pde::Burgers && beta <= 1.0 {
        return Err(invalid("beta", "the Burgers sine needs beta > 1 to stay positive"));
    }
    let a = raw.a.unwrap_or(1.0);
    if !a.is_finite() {
        return Err(invalid("a", "must be finite"));
    }

    let ri = raw.integrator.unwrap_or_default();
    let method = match ri.method.as_deref() {
        None | Some("dopri") | Some("dp5") => Method::DormandPrince54,
        Some("rk4") => Method::Rk4,
        Some(m) => return Err(invalid("integrator.method", format!("unknown method `{m}` (dopri, rk4)"))),
    };
    let default_tf = match (command, pde) {
        (Command::Vortex, _) => IsentropicVortex { mach, ..vortex }.period(),
        (Command::KhiDemo, _) => 15.0,
        (_, Pde::Burgers) => burgers_breaking_time(),
        (_, Pde::Euler) => 10.0,
        _ => 1.0,
    };
    let t_final = positive("integrator.t_final", ri.t_final.unwrap_or(default_tf))?;
    let tol = positive("integrator.tol", ri.tol.unwrap_or(match command {
        Command::Convergence => 1e-13,
        Command::KhiDemo => 1e-7,
        _ => 1e-10,
    }))?;
    if method == Method::Rk4 && ri.dt.is_none() && ri.cfl.is_none() {
        return Err(invalid("integrator.dt", "rk4 needs `dt` or `cfl`"));
    }
    let dt = ri.dt.map(|v| positive("integrator.dt", v)).transpose()?;
    let cfl = ri.cfl.map(|v| positive("integrator.cfl", v)).transpose()?;
    let output_interval = positive(
        "integrator.output_interval",
        ri.output_interval.unwrap_or(t_final / if pde == Pde::Burgers { 20.0 } else { 100.0 }),
    )?;

    Ok(ExperimentConfig {
        command,
        family,
        p,
        n,
        blocks,
        grids,
        pde,
        problem,
        scheme,
        sat,
        dissipation,
        eps_source,
        a,
        gamma,
        beta,
        mach,
        radius,
        jacobian_history: raw.jacobian_history.unwrap_or(false),
        seed: raw.seed.unwrap_or(0),
        integrator: IntegratorConfig {
            method,
            tol,
            dt,
            cfl,
            t_final,
            output_interval,
        },
    })
}
