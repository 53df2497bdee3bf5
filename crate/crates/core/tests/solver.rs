use approx::assert_relative_eq;
use nalgebra::DMatrix;
use num_complex::Complex64;
use sbpdiss::solver::{
    eigenvalues, fit_rate, integrate, jacobian, spectrum, CrashCause, EigenError, FnRhs,
    JacobianMethod, Rhs, RhsError, TimeIntegrator,
};

fn decay() -> impl Rhs {
    FnRhs::new(1, |_t: f64, u: &[f64], o: &mut [f64]| o[0] = -u[0])
}

#[test]
fn exponential_decay_dopri_and_rk4() {
    let rhs = decay();
    let mut seen = Vec::new();
    let tr = integrate(&rhs, &[1.0], &TimeIntegrator::dopri(2.0, 1e-10), &[0.5, 1.0, 2.0], &mut |t, u| {
        seen.push((t, u[0]))
    });
    assert!(tr.crash.is_none());
    assert_eq!(tr.t, 2.0);
    assert!((tr.u[0] - (-2.0f64).exp()).abs() < 1e-9);
    assert_eq!(seen.iter().map(|s| s.0).collect::<Vec<_>>(), vec![0.5, 1.0, 2.0]);
    for (t, v) in seen {
        assert!((v - (-t).exp()).abs() < 1e-9);
    }

    let tr = integrate(&rhs, &[1.0], &TimeIntegrator::rk4(1.0, 0.1), &[], &mut |_, _| {});
    assert_eq!(tr.accepted, 10);
    assert!((tr.u[0] - (-1.0f64).exp()).abs() < 1e-6);
}

#[test]
fn rk4_fourth_order() {
    let rhs = FnRhs::new(2, |_t: f64, u: &[f64], o: &mut [f64]| {
        o[0] = u[1];
        o[1] = -u[0];
    });
    let steps = [10usize, 20, 40, 80];
    let errs: Vec<f64> = steps
        .iter()
        .map(|&n| {
            let tr = integrate(&rhs, &[1.0, 0.0], &TimeIntegrator::rk4(1.0, 1.0 / n as f64), &[], &mut |_, _| {});
            ((tr.u[0] - 1f64.cos()).powi(2) + (tr.u[1] + 1f64.sin()).powi(2)).sqrt()
        })
        .collect();
    let h: Vec<f64> = steps.iter().map(|&n| 1.0 / n as f64).collect();
    let (rate, _) = fit_rate(&h, &errs);
    assert!((rate.abs() - 4.0).abs() < 0.1, "{rate}");
}

#[test]
fn quadratic_map_jacobian() {
    let rhs = FnRhs::with_complex(
        3,
        |_t: f64, u: &[f64], o: &mut [f64]| o.iter_mut().zip(u).for_each(|(o, u)| *o = u * u),
        |_t: f64, u: &[Complex64], o: &mut [Complex64]| o.iter_mut().zip(u).for_each(|(o, u)| *o = u * u),
    );
    let u = [1.0, -2.0, 0.5];
    let (m, method) = jacobian(&rhs, 0.0, &u).unwrap();
    assert_eq!(method, JacobianMethod::ComplexStep);
    assert_eq!(m, DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![2.0, -4.0, 1.0])));
}

#[test]
fn real_only_rhs_falls_back_to_differences() {
    let rhs = FnRhs::new(2, |_t: f64, u: &[f64], o: &mut [f64]| {
        o[0] = u[0] * u[1];
        o[1] = u[0].sin();
    });
    let (m, method) = jacobian(&rhs, 0.0, &[0.3, 2.0]).unwrap();
    assert_eq!(method, JacobianMethod::FiniteDifference);
    assert_relative_eq!(m[(0, 0)], 2.0, max_relative = 1e-8);
    assert_relative_eq!(m[(0, 1)], 0.3, max_relative = 1e-8);
    assert_relative_eq!(m[(1, 0)], 0.3f64.cos(), max_relative = 1e-8);
    assert!(m[(1, 1)].abs() < 1e-12);
    let report = spectrum(&rhs, 0.0, &[0.3, 2.0]).unwrap();
    assert_eq!(report.method, JacobianMethod::FiniteDifference);
}

#[test]
fn eigenvalue_examples() {
    let ev = eigenvalues(&DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![3.0, -1.0, 2.0]))).unwrap();
    let re: Vec<f64> = ev.iter().map(|z| z.re).collect();
    assert_eq!(re, vec![-1.0, 2.0, 3.0]);

    let rot = DMatrix::from_row_slice(2, 2, &[0.0, -1.0, 1.0, 0.0]);
    let ev = eigenvalues(&rot).unwrap();
    assert!(ev[0].re.abs() < 1e-15 && (ev[0].im + 1.0).abs() < 1e-15);
    assert!((ev[1].im - 1.0).abs() < 1e-15);

    // Circulant shift: eigenvalues are the n-th roots of unity.
    let n = 8;
    let c = DMatrix::from_fn(n, n, |i, j| if j == (i + 1) % n { 1.0 } else { 0.0 });
    let ev = eigenvalues(&c).unwrap();
    for z in &ev {
        assert!((z.norm() - 1.0).abs() < 1e-13);
    }
    let mut conj = 0;
    for z in &ev {
        if z.im.abs() > 1e-12 {
            assert!(ev.iter().any(|w| (w - z.conj()).norm() < 1e-12));
            conj += 1;
        }
    }
    assert_eq!(conj, n - 2);

    assert!(matches!(eigenvalues(&DMatrix::zeros(2, 3)), Err(EigenError::NotSquare(2, 3))));
}

#[test]
fn spectrum_report() {
    let rhs = FnRhs::with_complex(
        2,
        |_t: f64, u: &[f64], o: &mut [f64]| {
            o[0] = -0.5 * u[0] + 2.0 * u[1];
            o[1] = -2.0 * u[0] - 0.5 * u[1];
        },
        |_t: f64, u: &[Complex64], o: &mut [Complex64]| {
            o[0] = u[0] * -0.5 + u[1] * 2.0;
            o[1] = u[0] * -2.0 - u[1] * 0.5;
        },
    );
    let r = spectrum(&rhs, 0.0, &[0.0, 0.0]).unwrap();
    assert_relative_eq!(r.max_real_part, -0.5, epsilon = 1e-14);
    assert_relative_eq!(r.spectral_radius, 4.25f64.sqrt(), epsilon = 1e-14);
    assert_eq!(r.method, JacobianMethod::ComplexStep);
}

/// `u' = u^2` blows up at `t = 1` from `u = 1`.
struct BlowUp;

impl Rhs for BlowUp {
    fn dim(&self) -> usize {
        1
    }
    fn eval(&self, _t: f64, u: &[f64], out: &mut [f64]) -> Result<(), RhsError> {
        out[0] = u[0] * u[0];
        Ok(())
    }
    fn check_state(&self, u: &[f64]) -> Result<(), RhsError> {
        if u[0] > 1e6 {
            return Err(RhsError::NonAdmissibleState(format!("u = {}", u[0])));
        }
        Ok(())
    }
}

#[test]
fn crashes_are_reported() {
    let tr = integrate(&BlowUp, &[1.0], &TimeIntegrator::dopri(2.0, 1e-8), &[], &mut |_, _| {});
    let crash = tr.crash.expect("blow-up should be detected");
    assert!(crash.time < 1.0 && crash.time > 0.99, "{}", crash.time);
    assert!(tr.t <= crash.time);
    assert!(tr.u[0].is_finite());

    let tr = integrate(&BlowUp, &[1.0], &TimeIntegrator::rk4(2.0, 0.01), &[], &mut |_, _| {});
    assert!(matches!(tr.crash.unwrap().cause, CrashCause::NonAdmissible(_) | CrashCause::NonFinite));

    let mut integ = TimeIntegrator::dopri(10.0, 1e-8);
    integ.max_steps = 3;
    let tr = integrate(&decay(), &[1.0], &integ, &[], &mut |_, _| {});
    assert_eq!(tr.crash.unwrap().cause, CrashCause::StepLimit);
}
