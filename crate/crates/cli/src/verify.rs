//! The invariant suite behind `sbpdiss verify`.
//!
//! Every check reports a residual and a tolerance; the run passes iff all
//! residuals are within tolerance. Random draws come from the config seed.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sbpdiss::dissipation::{CoefficientMode, Coefficients, DissipationConfig, DissipationOperator};
use sbpdiss::operators::{build_nodal_distribution, build_sbp_operator, csbp_min_nodes, Family, SbpOperator};
use sbpdiss::physics::{chandrashekar_flux, ranocha_flux_2d, Direction, Euler};
use sbpdiss::semidisc::{LinearAdvection, SatKind, Scheme, SemiDiscretization};
use sbpdiss::solver::jacobian;

use crate::commands::RunError;
use crate::config::ExperimentConfig;
use crate::output::{ExperimentResult, Table};

const DRAWS: usize = 200;

struct Report {
    table: Table,
    failures: usize,
}

impl Report {
    fn record(&mut self, invariant: &str, case: String, residual: f64, tol: f64) {
        let pass = residual <= tol;
        if !pass {
            self.failures += 1;
        }
        self.table.push(vec![invariant.into(), case.into(), residual.into(), tol.into(), pass.into()]);
    }
}

fn operators(n_csbp: usize) -> Vec<SbpOperator> {
    let mut ops = Vec::new();
    for p in 1..=4 {
        let n = n_csbp.max(csbp_min_nodes(p) + 2);
        let d = build_nodal_distribution(Family::Csbp, p, n).expect("valid distribution");
        ops.push(build_sbp_operator(&d, 1.0 / (n - 1) as f64).expect("valid operator"));
    }
    for fam in [Family::Lgl, Family::Lg] {
        for p in 1..=6 {
            let d = build_nodal_distribution(fam, p, p + 1).expect("valid distribution");
            ops.push(build_sbp_operator(&d, 0.1).expect("valid operator"));
        }
    }
    ops
}

fn label(op: &SbpOperator) -> String {
    format!("{} p={} N={}", op.family(), op.degree(), op.len())
}

fn dot_h(h: &[f64], a: &[f64], b: &[f64]) -> f64 {
    h.iter().zip(a.iter().zip(b)).map(|(h, (a, b))| h * a * b).sum()
}

fn amax(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn operator_checks(rep: &mut Report, ops: &[SbpOperator]) {
    for op in ops {
        let c = op.check();
        rep.record("sbp_property", label(op), c.sbp, 1e-12);
        rep.record("derivative_accuracy", label(op), c.accuracy, 1e-10);
        rep.record("norm_sum", label(op), c.norm_sum, 1e-12);
    }
}

fn dissipation_checks(rep: &mut Report, ops: &[SbpOperator], rng: &mut ChaCha8Rng) -> Result<(), RunError> {
    for op in ops {
        let p = op.degree();
        let orders: Vec<usize> = if op.family().is_spectral() { vec![p] } else { vec![p, p + 1] };
        for s in orders {
            let mode = if s % 2 == 1 { CoefficientMode::HalfNodeScalar } else { CoefficientMode::NodalScalar };
            let mut cfg = DissipationConfig::new(s, 0.01).with_mode(mode);
            cfg.include_b = !op.family().is_spectral();
            let d = DissipationOperator::new(op, cfg).map_err(|e| RunError::Runtime(e.to_string()))?;
            let case = format!("{} s={s}", label(op));
            let n = op.len();
            rep.record("undivided_accuracy", case.clone(), d.undivided().accuracy_residual(), 1e-9);

            let a: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..2.0)).collect();
            let apply = |q: &[f64], coeff: Coefficients<'_, f64>| {
                let mut out = vec![0.0; n];
                d.apply(1, q, coeff, &mut out).map(|_| out)
            };
            let err = |e: sbpdiss::dissipation::DissipationError| RunError::Runtime(e.to_string());
            let ones = vec![1.0; n];
            let r = apply(&ones, Coefficients::Scalar(&a)).map_err(err)?;
            rep.record("annihilates_constants", case.clone(), amax(&r), 1e-10);

            let (mut cons, mut diss): (f64, f64) = (0.0, 0.0);
            for _ in 0..10 {
                let q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let r = apply(&q, Coefficients::Scalar(&a)).map_err(err)?;
                let scale = amax(&r).max(1e-300) * op.h().iter().sum::<f64>();
                cons = cons.max(dot_h(op.h(), &ones, &r).abs() / scale);
                diss = diss.max(dot_h(op.h(), &q, &r) / scale);
            }
            rep.record("conservative", case.clone(), cons, 1e-12);
            rep.record("dissipative", case.clone(), diss.max(0.0), 1e-12);

            let m = d.dense(None).map_err(err)?;
            let hm = DMatrix::from_diagonal(&DVector::from_column_slice(op.h())) * m;
            let asym = (&hm - hm.transpose()).amax() / hm.amax().max(1e-300);
            rep.record("weighted_symmetry", case, asym, 1e-12);
        }
    }
    Ok(())
}

fn euler_state(rng: &mut ChaCha8Rng, e: &Euler) -> Vec<f64> {
    let mut u = vec![0.0; e.nvar()];
    let rho = rng.gen_range(0.2..3.0);
    let vel = [rng.gen_range(-2.0..2.0), if e.dim == 2 { rng.gen_range(-2.0..2.0) } else { 0.0 }];
    e.conservative(rho, vel, rng.gen_range(0.2..5.0), &mut u);
    u
}

/// Worst `|(wr - wl) . f* - (psi_r - psi_l)|` relative to the terms' size.
fn shuffle(e: &Euler, dir: Direction, ul: &[f64], ur: &[f64], f: &[f64]) -> f64 {
    let n = e.nvar();
    let (mut wl, mut wr) = (vec![0.0; n], vec![0.0; n]);
    e.entropy_variables(ul, &mut wl).expect("admissible");
    e.entropy_variables(ur, &mut wr).expect("admissible");
    let lhs: f64 = (0..n).map(|i| (wr[i] - wl[i]) * f[i]).sum();
    let scale: f64 = (0..n).map(|i| ((wr[i] - wl[i]) * f[i]).abs()).sum::<f64>().max(1.0);
    (lhs - (e.flux_potential(ur, dir) - e.flux_potential(ul, dir))).abs() / scale
}

fn physics_checks(rep: &mut Report, gamma: f64, rng: &mut ChaCha8Rng) {
    let e1 = Euler::new(gamma, 1);
    let e2 = Euler::new(gamma, 2);
    let (mut ch, mut ra, mut trip, mut barth): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for k in 0..DRAWS {
        let (ul, ur) = (euler_state(rng, &e1), euler_state(rng, &e1));
        let mut f = [0.0; 3];
        chandrashekar_flux(&e1, &ul, &ur, &mut f).expect("admissible");
        ch = ch.max(shuffle(&e1, Direction::X, &ul, &ur, &f));

        let dir = if k % 2 == 0 { Direction::X } else { Direction::Y };
        let (vl, vr) = (euler_state(rng, &e2), euler_state(rng, &e2));
        let mut g = [0.0; 4];
        ranocha_flux_2d(&e2, &vl, &vr, dir, &mut g).expect("admissible");
        ra = ra.max(shuffle(&e2, dir, &vl, &vr, &g));

        let (mut w, mut back) = ([0.0; 4], [0.0; 4]);
        e2.entropy_variables(&vl, &mut w).expect("admissible");
        e2.conservative_from_entropy(&w, &mut back);
        trip = trip.max((0..4).map(|i| (back[i] - vl[i]).abs() / vl[i].abs().max(1.0)).fold(0.0, f64::max));

        let eig = e2.eigen(&vl, dir);
        let x = DMatrix::from_fn(4, 4, |i, j| eig.barth[i * 4 + j]);
        let dudw = e2.dudw(&vl);
        let a = DMatrix::from_fn(4, 4, |i, j| dudw[i * 4 + j]);
        barth = barth.max((&x * x.transpose() - &a).amax() / a.amax());
    }
    rep.record("ec_flux_shuffle", "Chandrashekar 1D".into(), ch, 1e-12);
    rep.record("ec_flux_shuffle", "Ranocha 2D".into(), ra, 1e-12);
    rep.record("entropy_round_trip", "Euler 2D".into(), trip, 1e-12);
    rep.record("barth_scaling", "Euler 2D".into(), barth, 1e-10);
}

fn semidisc_checks(rep: &mut Report, gamma: f64, rng: &mut ChaCha8Rng) -> Result<(), RunError> {
    let setup = |e: sbpdiss::semidisc::SemidiscError| RunError::Runtime(e.to_string());
    let op = |p: usize, n: usize, len: f64| {
        let d = build_nodal_distribution(Family::Csbp, p, n).expect("valid distribution");
        build_sbp_operator(&d, len / (n - 1) as f64).expect("valid operator")
    };

    let adv = SemiDiscretization::new_1d(LinearAdvection::new_1d(1.0), op(2, 30, 1.0).into(), 1, 0.0, Scheme::Central, SatKind::Symmetric, None)
        .map_err(setup)?;
    let (m, _) = jacobian(&adv, 0.0, &vec![0.0; adv.len()]).map_err(|e| RunError::Runtime(e.to_string()))?;
    let hm = DMatrix::from_diagonal(&DVector::from_vec(adv.weights())) * m;
    rep.record("skew_adjoint_advection", "CSBP p=2 N=30".into(), (&hm + hm.transpose()).amax(), 1e-11);

    let e2 = Euler::new(gamma, 2);
    let o = op(2, 10, 0.5);
    let d = DissipationConfig::new(4, 0.01).with_mode(CoefficientMode::MatrixMatrixBlock);
    let sd = SemiDiscretization::new_2d(e2, o.clone().into(), o.into(), [2, 2], [0.0, 0.0], Scheme::HadamardEntropyStable, SatKind::EntropyDissipativeMatrix, Some(d))
        .map_err(setup)?;
    let u0 = euler_state(rng, &e2);
    let u: Vec<f64> = (0..sd.num_nodes()).flat_map(|_| u0.iter().cloned()).collect();
    let mut r = vec![0.0; u.len()];
    sd.rhs(&u, &mut r).map_err(setup)?;
    rep.record("free_stream", "Euler 2D Hadamard".into(), amax(&r), 1e-11);

    let e1 = Euler::new(gamma, 1);
    let sd = SemiDiscretization::new_1d(e1, op(3, 16, 0.5).into(), 3, 0.0, Scheme::HadamardEntropyStable, SatKind::Symmetric, None)
        .map_err(setup)?;
    let u: Vec<f64> = (0..sd.num_nodes()).flat_map(|_| euler_state(rng, &e1)).collect();
    let mut r = vec![0.0; u.len()];
    sd.rhs(&u, &mut r).map_err(setup)?;
    let w = sd.weights();
    let scale = amax(&r).max(1e-300);
    let cons = (0..3)
        .map(|v| (0..w.len()).map(|j| w[j] * r[j * 3 + v]).sum::<f64>().abs())
        .fold(0.0, f64::max);
    rep.record("conservation", "Euler 1D Hadamard".into(), cons / scale, 1e-12);
    let prod = sd.entropy_production(&u, &r).map_err(setup)?;
    rep.record("entropy_conservation", "Euler 1D Hadamard".into(), prod.abs() / scale, 1e-11);
    Ok(())
}

/// Runs the suite; `Ok(false)` means some invariant failed.
pub fn run(cfg: &ExperimentConfig, res: &mut ExperimentResult) -> Result<bool, RunError> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut rep = Report {
        table: Table::new("verify", &["invariant", "case", "residual", "tolerance", "pass"]),
        failures: 0,
    };
    let ops = operators(cfg.n);
    operator_checks(&mut rep, &ops);
    dissipation_checks(&mut rep, &ops, &mut rng)?;
    physics_checks(&mut rep, cfg.gamma, &mut rng);
    semidisc_checks(&mut rep, cfg.gamma, &mut rng)?;
    res.note("checks", rep.table.rows.len());
    res.note("failures", rep.failures);
    res.tables.push(rep.table);
    Ok(rep.failures == 0)
}
