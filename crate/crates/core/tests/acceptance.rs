//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Runs as a plain binary so every line is printed even when nothing fails.
//! Slow criteria run only with `--include-ignored` (or `--ignored`).

mod common;

use std::time::Instant;

use common::*;
use nalgebra::DMatrix;
use rand::Rng;
use sbpdiss::dissipation::{
    assemble_scalar_dissipation, CoefficientField, CoefficientMode, Coefficients,
    DissipationConfig, DissipationOperator,
};
use sbpdiss::operators::{build_upwind_pu2_block, csbp_min_nodes, Family};
use sbpdiss::physics::Euler;
use sbpdiss::problems::{
    burgers_breaking_time, burgers_sine, gaussian_exact, kelvin_helmholtz, DensityWave,
    IsentropicVortex,
};
use sbpdiss::semidisc::{
    BlockOperator, Burgers, LinearAdvection, Parts, SatKind, Scheme, SemiDiscretization,
};
use sbpdiss::solver::{
    fit_rate, h_norm_error, integrate, run_convergence, spectrum, TimeIntegrator,
};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn rows_match(m: &DMatrix<f64>, row: usize, pattern: &[f64], tol: f64) -> bool {
    (0..m.ncols()).all(|j| {
        let want = pattern.get(j).copied().unwrap_or(0.0);
        (m[(row, j)] - want).abs() <= tol
    })
}

fn shifted(prefix: usize, pattern: &[f64]) -> Vec<f64> {
    let mut v = vec![0.0; prefix];
    v.extend_from_slice(pattern);
    v
}

fn golden_matrices() -> Outcome {
    let n = 10;
    let op = csbp(1, n, (n - 1) as f64);
    let a = CoefficientField::constant(n, 1.0).unwrap();
    let with_b = assemble_scalar_dissipation(&op, 2, 1.0, true, false, &a).unwrap().matrix;
    let without = assemble_scalar_dissipation(&op, 2, 1.0, false, false, &a).unwrap().matrix;
    let tol = 1e-13;
    let b_rows: [&[f64]; 3] = [&[-2., 4., -2.], &[2., -5., 4., -1.], &[-1., 4., -6., 4., -1.]];
    let i_rows: [&[f64]; 4] = [
        &[-4., 8., -4.],
        &[4., -9., 6., -1.],
        &[-2., 6., -7., 4., -1.],
        &[-1., 4., -6., 4., -1.],
    ];
    let mut ok = true;
    for (m, rows) in [(&with_b, &b_rows[..]), (&without, &i_rows[..])] {
        for (r, pat) in rows.iter().enumerate() {
            let full = if r < 2 || pat.len() < 5 { pat.to_vec() } else { shifted(r - 2, pat) };
            ok &= rows_match(m, r, &full, tol);
            // Mirror image at the right boundary.
            let mut rev = vec![0.0; n];
            for (j, v) in full.iter().enumerate() {
                rev[n - 1 - j] = *v;
            }
            ok &= rows_match(m, n - 1 - r, &rev, tol);
        }
        for r in rows.len()..n - rows.len() {
            ok &= rows_match(m, r, &shifted(r - 2, &[-1., 4., -6., 4., -1.]), tol);
        }
    }
    check(ok, "B and B = I row patterns, N = 10".into())
}

fn half_node_operator() -> Outcome {
    let n = 9;
    let dx = 1.0 / (n - 1) as f64;
    let op = csbp(1, n, 1.0);
    let mut r = rng(11);
    let mut worst: f64 = 0.0;
    for _ in 0..5 {
        let a: Vec<f64> = (0..n).map(|_| r.gen_range(0.1..3.0)).collect();
        let field = CoefficientField::half_node_scalar(a.clone()).unwrap();
        let m = assemble_scalar_dissipation(&op, 1, 1.0, true, false, &field).unwrap().matrix * dx;
        let mut want = DMatrix::<f64>::zeros(n, n);
        want[(0, 0)] = -(a[0] + a[1]);
        want[(0, 1)] = a[0] + a[1];
        for i in 1..n - 1 {
            want[(i, i - 1)] = 0.5 * (a[i - 1] + a[i]);
            want[(i, i)] = -(0.5 * a[i - 1] + a[i] + 0.5 * a[i + 1]);
            want[(i, i + 1)] = 0.5 * (a[i] + a[i + 1]);
        }
        want[(n - 1, n - 2)] = a[n - 2] + a[n - 1];
        want[(n - 1, n - 1)] = -(a[n - 2] + a[n - 1]);
        worst = worst.max((m - want).amax());
    }
    check(worst <= 1e-13, format!("max entry deviation {worst:.2e} over 5 coefficient draws"))
}

fn antidissipation() -> Outcome {
    let up = build_upwind_pu2_block();
    let x = up.nodes();
    let u: Vec<f64> = x.iter().map(|x| 2.0 + 6.0 * x - x * x).collect();
    let s = up.s();
    let mut direct = 0.0;
    for i in 0..5 {
        for j in 0..5 {
            direct -= u[i] * s[(i, j)] * u[j].abs() * u[j];
        }
    }
    // The same number from the residual: FVS minus central is the built-in
    // dissipation of the upwind pair.
    let mk = |scheme| {
        SemiDiscretization::new_1d(Burgers, up.clone().into(), 1, 0.0, scheme, SatKind::Symmetric, None)
            .unwrap()
    };
    let mut rf = vec![0.0; 5];
    let mut rc = vec![0.0; 5];
    mk(Scheme::UpwindFVS).rhs(&u, &mut rf).unwrap();
    mk(Scheme::Central).rhs(&u, &mut rc).unwrap();
    let diff: Vec<f64> = rf.iter().zip(&rc).map(|(a, b)| a - b).collect();
    let via_rhs = dot_h(up.h(), &u, &diff);
    check(
        (direct - 0.185).abs() <= 0.005 && (via_rhs - direct).abs() < 1e-12,
        format!("u^T H A_D u = {direct:.6} (residual path {via_rhs:.6})"),
    )
}

/// Scalar dissipation variants across operator families.
fn scalar_variants() -> Vec<(sbpdiss::operators::SbpOperator, DissipationConfig)> {
    let mut out = Vec::new();
    for p in 1..=4 {
        let op = csbp(p, 3 * p + 8, 1.0);
        for s in [p, p + 1] {
            for (b, ht) in [(true, false), (false, false), (true, true), (false, true)] {
                let mode = if s % 2 == 1 { CoefficientMode::HalfNodeScalar } else { CoefficientMode::NodalScalar };
                let mut c = DissipationConfig::new(s, 0.1).with_mode(mode);
                c.include_b = b;
                c.include_htilde = ht;
                out.push((op.clone(), c));
            }
        }
    }
    for fam in [Family::Lgl, Family::Lg] {
        for p in 2..=6 {
            let mode = if p % 2 == 1 { CoefficientMode::HalfNodeScalar } else { CoefficientMode::NodalScalar };
            let mut c = DissipationConfig::new(p, 0.1).with_mode(mode);
            c.include_b = false;
            out.push((element(fam, p, 0.7), c));
        }
    }
    out
}

fn property_suites() -> Outcome {
    let tol = 1e-11;
    let mut r = rng(2024);
    let variants = scalar_variants();
    let (mut worst_c, mut worst_d) = (0.0f64, f64::NEG_INFINITY);
    for k in 0..1000 {
        let (op, cfg) = &variants[k % variants.len()];
        let n = op.len();
        let d = DissipationOperator::new(op, *cfg).unwrap();
        let q: Vec<f64> = (0..n).map(|_| r.gen_range(-1.0..1.0)).collect();
        let a: Vec<f64> = (0..n).map(|_| r.gen_range(0.0..2.0)).collect();
        let mut out = vec![0.0; n];
        d.apply(1, &q, Coefficients::Scalar(&a), &mut out).unwrap();
        let m = d.dense(Some(&a)).unwrap();
        let scale = max_abs(&q) * m.amax() * op.length();
        let cons: f64 = out.iter().zip(op.h()).map(|(v, h)| v * h).sum();
        let diss = dot_h(op.h(), &q, &out);
        worst_c = worst_c.max(cons.abs() / scale);
        worst_d = worst_d.max(diss / (scale * max_abs(&q)));
    }

    // Euler system variants through the full residual, dissipation only.
    let mut worst_sys_c = 0.0f64;
    let mut worst_sys_d = f64::NEG_INFINITY;
    let modes = [
        CoefficientMode::ScalarBlock,
        CoefficientMode::MatrixBlock,
        CoefficientMode::ScalarMatrixBlock,
        CoefficientMode::MatrixMatrixBlock,
    ];
    for k in 0..1000 {
        let mode = modes[k % 4];
        let p = 2 + (k / 4) % 3;
        let s = p + (k / 12) % 2;
        let two_d = (k / 24) % 2 == 1;
        let euler = Euler::new(1.4, if two_d { 2 } else { 1 });
        let nb = csbp_min_nodes(p) + 2;
        let cfg = diss(s, 0.05, mode);
        let sd = if two_d {
            SemiDiscretization::new_2d(
                euler,
                csbp(p, nb, 1.0).into(),
                csbp(p, nb, 1.3).into(),
                [1, 1],
                [0.0, 0.0],
                Scheme::Central,
                SatKind::Symmetric,
                Some(cfg),
            )
        } else {
            SemiDiscretization::new_1d(euler, csbp(p, nb, 1.0).into(), 2, 0.0, Scheme::Central, SatKind::Symmetric, Some(cfg))
        }
        .unwrap();
        let u = euler_field(&mut r, &euler, sd.num_nodes());
        let mut res = vec![0.0; u.len()];
        sd.residual(&u, &mut res, Parts::DISSIPATION).unwrap();
        let h = sd.weights();
        let nv = euler.nvar();
        let scale = max_abs(&u) * max_abs(&res).max(1e-300);
        for v in 0..nv {
            let tot: f64 = res.chunks(nv).zip(&h).map(|(r, w)| r[v] * w).sum();
            let mass: f64 = h.iter().sum();
            worst_sys_c = worst_sys_c.max(tot.abs() / (max_abs(&res) * mass));
        }
        let rate = match mode {
            CoefficientMode::ScalarBlock => Some(dot_h(&h, &u, &res)),
            CoefficientMode::ScalarMatrixBlock | CoefficientMode::MatrixMatrixBlock => {
                Some(sd.entropy_production(&u, &res).unwrap())
            }
            // Conservative matrix dissipation is not energy stable in general.
            _ => None,
        };
        if let Some(rate) = rate {
            let mut w = vec![0.0; u.len()];
            for (uj, wj) in u.chunks(nv).zip(w.chunks_mut(nv)) {
                euler.entropy_variables(uj, wj).unwrap();
            }
            let sc = if mode == CoefficientMode::ScalarBlock { scale } else { max_abs(&w) * max_abs(&res) };
            worst_sys_d = worst_sys_d.max(rate / sc);
        }
    }

    // Free stream in 2D for several schemes.
    let mut worst_fs = 0.0f64;
    for k in 0..1000 {
        let euler = Euler::new(1.4, 2);
        let (scheme, sat, mode, fam) = match k % 4 {
            0 => (Scheme::HadamardEntropyStable, SatKind::EntropyDissipativeMatrix, CoefficientMode::MatrixMatrixBlock, Family::Csbp),
            1 => (Scheme::Central, SatKind::RoeMatrix, CoefficientMode::MatrixBlock, Family::Csbp),
            2 => (Scheme::HadamardEntropyStable, SatKind::Rusanov, CoefficientMode::ScalarMatrixBlock, Family::Lgl),
            _ => (Scheme::Central, SatKind::LaxFriedrichs, CoefficientMode::ScalarBlock, Family::Lg),
        };
        let (ox, oy, blocks, s) = if fam == Family::Csbp {
            (csbp(3, 14, 1.0), csbp(3, 12, 2.0), [2, 2], 4)
        } else {
            (element(fam, 3, 0.5), element(fam, 3, 0.4), [3, 3], 3)
        };
        let mut cfg = diss(s, 0.01, mode);
        cfg.include_b = fam == Family::Csbp;
        let sd = SemiDiscretization::new_2d(euler, ox.into(), oy.into(), blocks, [0.0, 0.0], scheme, sat, Some(cfg)).unwrap();
        let st = euler_state(&mut r, &euler);
        let u: Vec<f64> = (0..sd.num_nodes()).flat_map(|_| st.iter().cloned()).collect();
        let mut res = vec![0.0; u.len()];
        sd.rhs(&u, &mut res).unwrap();
        worst_fs = worst_fs.max(max_abs(&res));
    }
    let ok = worst_c <= tol && worst_d <= tol && worst_sys_c <= tol && worst_sys_d <= tol && worst_fs <= 1e-12;
    check(
        ok,
        format!(
            "scalar cons {worst_c:.1e} diss {worst_d:.1e}; system cons {worst_sys_c:.1e} diss {worst_sys_d:.1e}; free stream {worst_fs:.1e}"
        ),
    )
}

fn se_structure() -> Outcome {
    let mut worst_rank: f64 = 0.0;
    let mut worst_poly: f64 = 0.0;
    let mut worst_agree: f64 = 0.0;
    for fam in [Family::Lgl, Family::Lg] {
        for p in 2..=6 {
            let op = element(fam, p, 1.0);
            let mut mats = Vec::new();
            for (b, ht) in [(true, false), (false, false), (true, true), (false, true)] {
                let mut c = DissipationConfig::new(p, 1.0);
                c.include_b = b;
                c.include_htilde = ht;
                let m = DissipationOperator::new(&op, c).unwrap().dense(None).unwrap();
                let sv = m.clone().svd(false, false).singular_values;
                let mut sv: Vec<f64> = sv.iter().cloned().collect();
                sv.sort_by(|a, b| b.total_cmp(a));
                worst_rank = worst_rank.max(sv[1] / sv[0]);
                let x = op.physical_nodes();
                for k in 0..p {
                    let xk = nalgebra::DVector::from_iterator(x.len(), x.iter().map(|v| v.powi(k as i32)));
                    worst_poly = worst_poly.max((&m * &xk).amax() / (m.amax() * xk.amax()));
                }
                mats.push(&m / m.norm());
            }
            for m in &mats[1..] {
                worst_agree = worst_agree.max((m - &mats[0]).amax());
            }
        }
    }
    check(
        worst_rank <= 1e-10 && worst_poly <= 1e-10 && worst_agree <= 1e-10,
        format!("sigma2/sigma1 {worst_rank:.1e}, monomials {worst_poly:.1e}, C choices {worst_agree:.1e}"),
    )
}

fn advection(p: usize, n: usize, sat: SatKind, d: Option<DissipationConfig>) -> SemiDiscretization<LinearAdvection> {
    SemiDiscretization::new_1d(LinearAdvection::new_1d(1.0), csbp(p, n, 1.0).into(), 1, 0.0, Scheme::Central, sat, d)
        .unwrap()
}

fn gaussian_error(p: usize, n: usize, t: f64) -> Result<f64, String> {
    let s = p + 1;
    let sd = advection(p, n, SatKind::LaxFriedrichs, Some(diss(s, eps_large(s), CoefficientMode::NodalScalar)));
    let u0 = sd.project(|x, _, u| u[0] = gaussian_exact(x, 0.0, 1.0));
    let traj = integrate(&sd, &u0, &TimeIntegrator::dopri(t, 1e-13), &[], &mut |_, _| {});
    if let Some(c) = traj.crash {
        return Err(format!("{:?}", c.cause));
    }
    let exact = sd.project(|x, _, u| u[0] = gaussian_exact(x, t, 1.0));
    Ok(h_norm_error(&sd.weights(), &traj.u, &exact))
}

fn convergence() -> Outcome {
    let grids = [40, 60, 80, 120, 160];
    let mut ok = true;
    let mut detail = Vec::new();
    for p in [3, 4] {
        let rep = run_convergence(&grids, |n| gaussian_error(p, n, 1.0)).map_err(|e| e.to_string())?;
        let rate = rep.rate.unwrap_or(f64::NAN);
        let need = if p == 4 { p as f64 + 1.5 } else { p as f64 + 1.0 - 0.15 };
        ok &= rate >= need;
        detail.push(format!("p={p} rate {rate:.2} (need {need:.2}, finest error {:.2e})", rep.errors[grids.len() - 1]));
    }
    check(ok, detail.join("; "))
}

fn lce_spectra() -> Outcome {
    let u = vec![0.0; 80];
    let with = spectrum(&advection(3, 80, SatKind::LaxFriedrichs, Some(DissipationConfig::new(4, 0.005))), 0.0, &u)
        .map_err(|e| e.to_string())?;
    let without = spectrum(&advection(3, 80, SatKind::LaxFriedrichs, None), 0.0, &u).map_err(|e| e.to_string())?;
    let ratio = with.spectral_radius / without.spectral_radius;
    check(
        with.max_real_part <= 1e-10 && ratio <= 1.25,
        format!("max Re {:.2e}, spectral radius ratio {ratio:.3}", with.max_real_part),
    )
}

fn burgers(n: usize, sat: SatKind, d: Option<DissipationConfig>) -> SemiDiscretization<Burgers> {
    SemiDiscretization::new_1d(Burgers, csbp(2, n, 1.0).into(), 1, 0.0, Scheme::SplitFormBurgers, sat, d).unwrap()
}

/// Max real part of the Jacobian spectrum at `samples` times up to breaking.
fn burgers_max_re(eps: f64, samples: usize) -> Result<Vec<f64>, String> {
    let d = (eps > 0.0).then(|| diss(3, eps, CoefficientMode::HalfNodeScalar));
    let sd = burgers(40, SatKind::Rusanov, d);
    let u0 = sd.project(|x, _, u| u[0] = burgers_sine(x, 1.5));
    let tb = burgers_breaking_time();
    let times: Vec<f64> = (0..samples).map(|k| tb * k as f64 / (samples - 1) as f64).collect();
    let mut states = Vec::new();
    let traj = integrate(&sd, &u0, &TimeIntegrator::dopri(tb, 1e-12), &times, &mut |_, u| states.push(u.to_vec()));
    if traj.crash.is_some() {
        return Err("crashed".into());
    }
    states
        .iter()
        .map(|u| spectrum(&sd, 0.0, u).map(|s| s.max_real_part).map_err(|e| e.to_string()))
        .collect()
}

fn burgers_stability() -> Outcome {
    let eps = eps_large(3);
    let with = burgers_max_re(eps, 20)?;
    let without = burgers_max_re(0.0, 20)?;
    let small = burgers_max_re(eps_small(3), 20)?;
    let w = with.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let ws = small.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let wo = without.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    check(
        w <= 1e-9 && wo > 1e-5,
        format!("max Re with eps {eps}: {w:.2e} (small preset {ws:.2e}); without: {wo:.2e}"),
    )
}

fn burgers_energy() -> Outcome {
    let tb = burgers_breaking_time();
    let times: Vec<f64> = (0..=40).map(|k| tb * k as f64 / 40.0).collect();
    let run = |sd: &SemiDiscretization<Burgers>| {
        let u0 = sd.project(|x, _, u| u[0] = burgers_sine(x, 1.5));
        let mut e = Vec::new();
        let traj = integrate(sd, &u0, &TimeIntegrator::dopri(tb, 1e-13), &times, &mut |_, u| {
            e.push(sd.evaluate_functionals(u).energy)
        });
        (e, traj.crash.is_none())
    };
    let (ec, ok1) = run(&burgers(40, SatKind::Symmetric, None));
    let drift = ec.iter().map(|e| (e - ec[0]).abs()).fold(0.0, f64::max);
    let (ed, ok2) = run(&burgers(40, SatKind::Rusanov, Some(diss(3, eps_large(3), CoefficientMode::HalfNodeScalar))));
    let rise = ed.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    check(
        ok1 && ok2 && drift <= 1e-9 && rise <= 1e-12,
        format!("conservative drift {drift:.2e}; dissipative largest increase {rise:.2e}"),
    )
}

fn density_wave(n: usize, eps: f64) -> SemiDiscretization<Euler> {
    let euler = Euler::new(1.4, 1);
    SemiDiscretization::new_1d(
        euler,
        csbp(4, n, 2.0).into(),
        1,
        -1.0,
        Scheme::HadamardEntropyStable,
        SatKind::EntropyDissipativeMatrix,
        Some(diss(5, eps, CoefficientMode::MatrixMatrixBlock)),
    )
    .unwrap()
}

fn euler_density_wave() -> Outcome {
    let eps = eps_small(5);
    let mut detail = Vec::new();
    let mut ok = true;
    let mut max_re = Vec::new();
    for n in [80, 160] {
        let sd = density_wave(n, eps);
        let dw = DensityWave::default();
        let u0 = sd.project(|x, _, u| dw.state(sd.law(), x, 0.0, u));
        max_re.push(spectrum(&sd, 0.0, &u0).map_err(|e| e.to_string())?.max_real_part);
        let times: Vec<f64> = (0..=100).map(|k| 0.1 * k as f64).collect();
        let mut s = Vec::new();
        let traj = integrate(&sd, &u0, &TimeIntegrator::dopri(10.0, 1e-9), &times, &mut |_, u| {
            s.push(sd.evaluate_functionals(u).entropy)
        });
        let rise = s.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
        let slack = 1e-10 * s[0].abs();
        ok &= traj.crash.is_none() && rise <= slack;
        detail.push(format!(
            "N={n}: crash {:?}, entropy rise {rise:.1e}",
            traj.crash.map(|c| c.time)
        ));
    }
    let drop = max_re[0] / max_re[1].max(1e-300);
    ok &= drop >= 10.0;
    detail.push(format!("max Re {:.2e} -> {:.2e}", max_re[0], max_re[1]));
    check(ok, detail.join("; "))
}

fn vortex() -> Outcome {
    let v = IsentropicVortex::default();
    let euler = Euler::new(1.4, 2);
    let s = 4;
    let run = |n: usize| -> Result<f64, String> {
        let o = csbp(3, n, v.side);
        let sd = SemiDiscretization::new_2d(
            euler,
            o.clone().into(),
            o.into(),
            [1, 1],
            [v.lo, v.lo],
            Scheme::Central,
            SatKind::RoeMatrix,
            Some(diss(s, eps_small(s), CoefficientMode::MatrixBlock)),
        )
        .map_err(|e| e.to_string())?;
        let u0 = sd.project(|x, y, u| v.state(&euler, x, y, 0.0, u));
        let tf = v.period();
        let traj = integrate(&sd, &u0, &TimeIntegrator::dopri(tf, 1e-10), &[], &mut |_, _| {});
        if let Some(c) = traj.crash {
            return Err(format!("crash at {}", c.time));
        }
        let exact = sd.project(|x, y, u| v.state(&euler, x, y, tf, u));
        let p: Vec<f64> = traj.u.chunks(4).map(|u| euler.pressure(u)).collect();
        let pe: Vec<f64> = exact.chunks(4).map(|u| euler.pressure(u)).collect();
        Ok(h_norm_error(&sd.weights(), &p, &pe))
    };
    let grids = [30, 45, 60];
    let rep = run_convergence(&grids, run)?;
    let rate = rep.rate.unwrap_or(f64::NAN);
    check(rate >= 3.6, format!("pressure errors {:?}, rate {rate:.2}", rep.errors))
}

fn integrator_order() -> Outcome {
    let rhs = sbpdiss::solver::FnRhs::new(1, |_, u: &[f64], out: &mut [f64]| out[0] = -u[0]);
    let exact = (-1.0f64).exp();
    let steps = [10.0, 20.0, 40.0, 80.0];
    let errs: Vec<f64> = steps
        .iter()
        .map(|n| (integrate(&rhs, &[1.0], &TimeIntegrator::rk4(1.0, 1.0 / n), &[], &mut |_, _| {}).u[0] - exact).abs())
        .collect();
    let (rate, _) = fit_rate(&steps, &errs);
    // From 1e-6 down; looser tolerances take only four steps on [0, 1] and
    // the clipped final step makes the response erratic there.
    let mut tol = 1e-6;
    let mut prev = f64::INFINITY;
    let mut monotone = true;
    for _ in 0..20 {
        let e = (integrate(&rhs, &[1.0], &TimeIntegrator::dopri(1.0, tol), &[], &mut |_, _| {}).u[0] - exact).abs();
        monotone &= e <= prev;
        prev = e;
        tol *= 0.5;
    }
    let dp = integrate(&rhs, &[1.0], &TimeIntegrator::dopri(1.0, 1e-12), &[], &mut |_, _| {}).u[0];
    check(
        (rate - 4.0).abs() <= 0.1 && monotone && (dp - exact).abs() <= 1e-10 * exact,
        format!("RK4 rate {rate:.3}; tolerance halving monotone: {monotone}; DP5 error {:.1e}", (dp - exact).abs()),
    )
}

fn khi(entropy: bool, n: usize, tf: f64) -> (f64, Vec<f64>) {
    let euler = Euler::new(1.4, 2);
    let o: BlockOperator = csbp(3, n, 2.0).into();
    let (scheme, sat, d) = if entropy {
        (Scheme::HadamardEntropyStable, SatKind::EntropyDissipativeMatrix, Some(diss(4, eps_small(4), CoefficientMode::MatrixMatrixBlock)))
    } else {
        (Scheme::Central, SatKind::RoeMatrix, None)
    };
    let sd = SemiDiscretization::new_2d(euler, o.clone(), o, [1, 1], [-1.0, -1.0], scheme, sat, d).unwrap();
    let u0 = sd.project(|x, y, u| kelvin_helmholtz(&euler, x, y, u));
    let times: Vec<f64> = (0..=(tf * 4.0) as usize).map(|k| 0.25 * k as f64).collect();
    let mut s = Vec::new();
    let traj = integrate(&sd, &u0, &TimeIntegrator::dopri(tf, 1e-7), &times, &mut |_, u| {
        s.push(sd.evaluate_functionals(u).entropy)
    });
    (traj.crash.map(|c| c.time).unwrap_or(tf), s)
}

fn khi_demo() -> Outcome {
    let tf = 15.0;
    let (tc, _) = khi(false, 32, tf);
    let (te, s) = khi(true, 32, tf);
    let rise = s.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let slack = 1e-8 * s[0].abs();
    check(
        te >= 3.0 * tc && rise <= slack,
        format!("central eps=0 survives to {tc:.2}, entropy + dissipation to {te:.2}; largest entropy rise {rise:.1e}"),
    )
}

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let slow = args.iter().any(|a| a == "--include-ignored" || a == "--ignored")
        || std::env::var_os("SBPDISS_SLOW").is_some();
    // `cargo test` may pass `--list` or a name filter.
    if args.iter().any(|a| a == "--list") {
        return;
    }
    let filter = args.iter().skip(1).find(|a| !a.starts_with('-')).cloned();
    let criteria: Vec<(&str, &str, fn() -> Outcome, bool)> = vec![
        ("1", "golden dissipation matrices", golden_matrices, false),
        ("2", "half-node first-order operator", half_node_operator, false),
        ("3", "upwind antidissipation counterexample", antidissipation, false),
        ("4", "conservation, dissipativity, free stream", property_suites, false),
        ("5", "spectral-element rank one and uniqueness", se_structure, false),
        ("6", "linear convection convergence", convergence, false),
        ("7", "linear convection spectra", lce_spectra, false),
        ("8", "Burgers local linear stability", burgers_stability, false),
        ("9", "Burgers energy", burgers_energy, false),
        ("10", "1D Euler density wave", euler_density_wave, false),
        ("11", "isentropic vortex convergence", vortex, true),
        ("12", "time integrator order", integrator_order, false),
        ("KHI", "Kelvin-Helmholtz demo robustness", khi_demo, false),
    ];
    let mut failed = 0;
    for (id, name, f, is_slow) in criteria {
        if let Some(pat) = &filter {
            if !name.contains(pat.as_str()) && id != pat {
                continue;
            }
        }
        if is_slow && !slow {
            println!("criterion {id:>3} {name}: SKIP (slow; run with --include-ignored)");
            continue;
        }
        let t0 = Instant::now();
        let res = std::panic::catch_unwind(f).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = t0.elapsed().as_secs_f64();
        match res {
            Ok(d) => println!("criterion {id:>3} {name}: PASS ({d}) [{secs:.1} s]"),
            Err(d) => {
                failed += 1;
                println!("criterion {id:>3} {name}: FAIL ({d}) [{secs:.1} s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
