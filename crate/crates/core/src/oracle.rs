//! Independent verification machinery: explicit Runge-Kutta integrators,
//! central finite differences and residual aggregation.
//!
//! Nothing in here knows about the closed forms it is used to check.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::error::{Error, Result};

/// Initial value problem `y' = rhs(t, y)`, `y(t0) = y0`, integrated up to `t_end`.
///
/// The right-hand side writes the derivative into its third argument and may
/// fail (for example when the state leaves the domain of a square root).
pub struct OdeProblem<F> {
    pub rhs: F,
    pub t0: f64,
    pub y0: Vec<f64>,
    pub t_end: f64,
}

impl<F> OdeProblem<F>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    pub fn new(rhs: F, t0: f64, y0: Vec<f64>, t_end: f64) -> Result<Self> {
        if !(t0.is_finite() && t_end.is_finite()) || t_end == t0 {
            return Err(Error::InvalidParameter(format!(
                "integration interval [{t0}, {t_end}] is empty or non-finite"
            )));
        }
        if y0.is_empty() || y0.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(
                "initial state must be non-empty and finite".into(),
            ));
        }
        Ok(Self { rhs, t0, y0, t_end })
    }

    fn eval(&self, t: f64, y: &[f64], out: &mut [f64]) -> Result<()> {
        (self.rhs)(t, y, out)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OdeSample {
    pub t: f64,
    pub y: Vec<f64>,
}

/// `y + h * sum(c_i k_i)`
fn combine(y: &[f64], h: f64, terms: &[(f64, &[f64])]) -> Vec<f64> {
    y.iter()
        .enumerate()
        .map(|(i, yi)| yi + h * terms.iter().map(|(c, k)| c * k[i]).sum::<f64>())
        .collect()
}

fn check_finite(y: &[f64], last_t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::IntegrationBlowup { last_t })
    }
}

/// Classical fourth-order Runge-Kutta with a uniform step.
///
/// The step is shrunk slightly so that an integer number of steps lands
/// exactly on `t_end`. Integration backwards in time is allowed.
pub fn rk4_integrate<F>(problem: &OdeProblem<F>, step: f64) -> Result<Vec<OdeSample>>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidParameter(format!("rk4 step must be > 0, got {step}")));
    }
    let span = problem.t_end - problem.t0;
    let n_steps = ((span.abs() / step) - 1e-9).ceil().max(1.0) as usize;
    let h = span / n_steps as f64;
    let dim = problem.y0.len();

    let mut samples = Vec::with_capacity(n_steps + 1);
    let mut y = problem.y0.clone();
    samples.push(OdeSample {
        t: problem.t0,
        y: y.clone(),
    });

    let (mut k1, mut k2, mut k3, mut k4) = (vec![0.0; dim], vec![0.0; dim], vec![0.0; dim], vec![0.0; dim]);
    for i in 0..n_steps {
        let t = problem.t0 + i as f64 * h;
        problem.eval(t, &y, &mut k1)?;
        let y2 = combine(&y, h, &[(0.5, &k1)]);
        problem.eval(t + 0.5 * h, &y2, &mut k2)?;
        let y3 = combine(&y, h, &[(0.5, &k2)]);
        problem.eval(t + 0.5 * h, &y3, &mut k3)?;
        let y4 = combine(&y, h, &[(1.0, &k3)]);
        problem.eval(t + h, &y4, &mut k4)?;
        let next = combine(
            &y,
            h,
            &[(1.0 / 6.0, &k1), (1.0 / 3.0, &k2), (1.0 / 3.0, &k3), (1.0 / 6.0, &k4)],
        );
        check_finite(&next, t)?;
        y = next;
        let t_next = if i + 1 == n_steps {
            problem.t_end
        } else {
            problem.t0 + (i + 1) as f64 * h
        };
        samples.push(OdeSample {
            t: t_next,
            y: y.clone(),
        });
    }
    Ok(samples)
}

// Fehlberg 4(5) tableau.
const A: [[f64; 5]; 6] = [
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 4.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 32.0, 9.0 / 32.0, 0.0, 0.0, 0.0],
    [1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0.0, 0.0],
    [439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0.0],
    [-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0],
];
const C: [f64; 6] = [0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0];
const B5: [f64; 6] = [
    16.0 / 135.0,
    0.0,
    6656.0 / 12825.0,
    28561.0 / 56430.0,
    -9.0 / 50.0,
    2.0 / 55.0,
];
const B4: [f64; 6] = [25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0];

const MAX_RKF_STEPS: usize = 1_000_000;

/// Adaptive Runge-Kutta-Fehlberg 4(5).
///
/// The fifth-order solution is propagated; the embedded fourth-order one only
/// drives step control. A step is accepted when every component's error is
/// within `abs_tol + rel_tol * |y|`. Rejected steps shrink the step size; when
/// it falls below `1e-14 * |t_end - t0|` the problem is reported as singular.
/// A right-hand side that fails or returns non-finite values counts as a
/// rejected step, so integration that runs into a singularity ends in
/// [`Error::StepUnderflow`] rather than a blow-up.
pub fn rkf45_integrate<F>(problem: &OdeProblem<F>, rel_tol: f64, abs_tol: f64) -> Result<Vec<OdeSample>>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    if !(rel_tol > 0.0 && abs_tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "rkf45 tolerances must be > 0, got rel {rel_tol:e}, abs {abs_tol:e}"
        )));
    }
    let span = problem.t_end - problem.t0;
    let direction = span.signum();
    let h_min = 1e-14 * span.abs();
    let dim = problem.y0.len();

    let mut t = problem.t0;
    let mut y = problem.y0.clone();
    let mut h = span / 100.0;
    let mut samples = vec![OdeSample { t, y: y.clone() }];
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; dim]; 6];
    let mut last_error: Option<Error> = None;

    for _ in 0..MAX_RKF_STEPS {
        let remaining = problem.t_end - t;
        if remaining * direction <= 0.0 {
            return Ok(samples);
        }
        let last = h.abs() >= remaining.abs();
        if last {
            h = remaining;
        }

        match fehlberg_step(problem, t, &y, h, &mut k) {
            Ok((next, err_vec)) => {
                let err = err_vec
                    .iter()
                    .zip(y.iter().zip(&next))
                    .map(|(e, (a, b))| e.abs() / (abs_tol + rel_tol * a.abs().max(b.abs())))
                    .fold(
                        0.0_f64,
                        |m, v| if m.is_nan() || v.is_nan() { f64::NAN } else { m.max(v) },
                    );
                if err <= 1.0 {
                    last_error = None;
                    t = if last { problem.t_end } else { t + h };
                    y = next;
                    samples.push(OdeSample { t, y: y.clone() });
                    let factor = if err == 0.0 {
                        5.0
                    } else {
                        (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
                    };
                    h *= factor;
                    continue;
                }
                h *= if err.is_finite() {
                    (0.9 * err.powf(-0.25)).clamp(0.1, 0.5)
                } else {
                    0.1
                };
            }
            Err(e) => {
                last_error = Some(e);
                h *= 0.1;
            }
        }
        if h.abs() < h_min {
            return Err(match last_error {
                Some(e @ (Error::Domain(_) | Error::Degenerate { .. })) => e,
                _ => Error::StepUnderflow { t, h: h.abs() },
            });
        }
    }
    Err(Error::StepUnderflow { t, h: h.abs() })
}

type StepResult = (Vec<f64>, Vec<f64>);

fn fehlberg_step<F>(problem: &OdeProblem<F>, t: f64, y: &[f64], h: f64, k: &mut [Vec<f64>]) -> Result<StepResult>
where
    F: Fn(f64, &[f64], &mut [f64]) -> Result<()>,
{
    for stage in 0..6 {
        let stage_y = if stage == 0 {
            y.to_vec()
        } else {
            let terms: Vec<(f64, &[f64])> = (0..stage).map(|j| (A[stage][j], k[j].as_slice())).collect();
            combine(y, h, &terms)
        };
        problem.eval(t + C[stage] * h, &stage_y, &mut k[stage])?;
        check_finite(&k[stage], t)?;
    }
    let fifth: Vec<(f64, &[f64])> = B5.iter().zip(k.iter()).map(|(b, ki)| (*b, ki.as_slice())).collect();
    let next = combine(y, h, &fifth);
    let err: Vec<f64> = (0..y.len())
        .map(|i| h * (0..6).map(|s| (B5[s] - B4[s]) * k[s][i]).sum::<f64>())
        .collect();
    Ok((next, err))
}

/// Order of a central difference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiffOrder {
    First,
    Second,
}

/// Default step for finite differences around `t`.
pub fn default_step(t: f64) -> f64 {
    1e-5 * t.abs().max(1.0)
}

/// Second-order accurate central difference of `f` at `t`.
pub fn central_diff<F>(f: F, t: f64, h: f64, order: DiffOrder) -> f64
where
    F: Fn(f64) -> f64,
{
    match try_central_diff(|s| Ok::<_, std::convert::Infallible>(f(s)), t, h, order) {
        Ok(v) => v,
        Err(never) => match never {},
    }
}

/// [`central_diff`] for functions that can fail; the first failure is returned.
pub fn try_central_diff<F, E>(f: F, t: f64, h: f64, order: DiffOrder) -> Result<f64, E>
where
    F: Fn(f64) -> Result<f64, E>,
{
    // Offsets actually realized in floating point, so that rounding of t ± h
    // does not leak into the quotient.
    let (t_plus, t_minus) = (t + h, t - h);
    let (h_plus, h_minus) = (t_plus - t, t - t_minus);
    let plus = f(t_plus)?;
    let minus = f(t_minus)?;
    Ok(match order {
        DiffOrder::First => (plus - minus) / (h_plus + h_minus),
        DiffOrder::Second => {
            let centre = f(t)?;
            2.0 * ((plus - centre) / h_plus - (centre - minus) / h_minus) / (h_plus + h_minus)
        }
    })
}

/// Summary of one residual check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub model: String,
    pub params: BTreeMap<String, f64>,
    pub n_samples: usize,
    pub max_residual: f64,
    pub l2_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Max and L2 norms of `samples` (absolute values), compared against `tolerance`.
pub fn aggregate_residuals(
    samples: &[f64],
    tolerance: f64,
    model: &str,
    params: BTreeMap<String, f64>,
) -> Result<ResidualReport> {
    if samples.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(bad) = samples.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter(format!("non-finite residual {bad}")));
    }
    let max_residual = samples.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let l2_residual = samples.iter().map(|v| v * v).sum::<f64>().sqrt();
    Ok(ResidualReport {
        model: model.to_string(),
        params,
        n_samples: samples.len(),
        max_residual,
        l2_residual,
        tolerance,
        pass: max_residual <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::{E, FRAC_PI_2, PI};

    #[allow(clippy::type_complexity)]
    fn exp_problem(t_end: f64) -> OdeProblem<impl Fn(f64, &[f64], &mut [f64]) -> Result<()>> {
        OdeProblem::new(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[0];
                Ok(())
            },
            0.0,
            vec![1.0],
            t_end,
        )
        .unwrap()
    }

    #[allow(clippy::type_complexity)]
    fn oscillator_problem() -> OdeProblem<impl Fn(f64, &[f64], &mut [f64]) -> Result<()>> {
        OdeProblem::new(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[1];
                dy[1] = -y[0];
                Ok(())
            },
            0.0,
            vec![1.0, 0.0],
            2.0 * PI,
        )
        .unwrap()
    }

    #[test]
    fn rk4_examples() {
        let out = rk4_integrate(&exp_problem(1.0), 1e-3).unwrap();
        let last = out.last().unwrap();
        assert_eq!(last.t, 1.0);
        assert_abs_diff_eq!(last.y[0], E, epsilon = 1e-10);

        let zero = OdeProblem::new(
            |_, _: &[f64], dy: &mut [f64]| {
                dy[0] = 0.0;
                Ok(())
            },
            0.0,
            vec![3.25],
            5.0,
        )
        .unwrap();
        assert!(rk4_integrate(&zero, 0.1).unwrap().iter().all(|s| s.y[0] == 3.25));

        let cos = OdeProblem::new(
            |t, y: &[f64], dy: &mut [f64]| {
                dy[0] = -y[0] * 0.0 + t.cos();
                Ok(())
            },
            0.0,
            vec![0.0],
            FRAC_PI_2,
        )
        .unwrap();
        assert_abs_diff_eq!(
            rk4_integrate(&cos, 1e-3).unwrap().last().unwrap().y[0],
            1.0,
            epsilon = 1e-10
        );
    }

    #[test]
    fn rk4_is_fourth_order() {
        let err = |h: f64| (rk4_integrate(&exp_problem(1.0), h).unwrap().last().unwrap().y[0] - E).abs();
        let ratio = err(0.1) / err(0.05);
        assert!(ratio >= 14.0, "ratio {ratio}");
    }

    #[test]
    fn rk4_runs_backwards() {
        let p = OdeProblem::new(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[0];
                Ok(())
            },
            1.0,
            vec![E],
            0.0,
        )
        .unwrap();
        let out = rk4_integrate(&p, 1e-3).unwrap();
        assert_eq!(out.last().unwrap().t, 0.0);
        assert_abs_diff_eq!(out.last().unwrap().y[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn rk4_reports_blowup() {
        let p = OdeProblem::new(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = y[0] * y[0];
                Ok(())
            },
            0.0,
            vec![1.0],
            2.0,
        )
        .unwrap();
        match rk4_integrate(&p, 0.25) {
            Err(Error::IntegrationBlowup { last_t }) => assert!(last_t < 2.0),
            other => panic!("expected blowup, got {other:?}"),
        }
    }

    #[test]
    fn rkf45_examples() {
        let out = rkf45_integrate(&exp_problem(1.0), 1e-10, 1e-12).unwrap();
        assert_eq!(out.last().unwrap().t, 1.0);
        assert_abs_diff_eq!(out.last().unwrap().y[0], E, epsilon = 1e-8);

        let sqrt_rhs = OdeProblem::new(
            |t, _: &[f64], dy: &mut [f64]| {
                dy[0] = 1.0 / (2.0 * t.sqrt());
                Ok(())
            },
            0.0,
            vec![0.0],
            1.0,
        )
        .unwrap();
        assert!(matches!(
            rkf45_integrate(&sqrt_rhs, 1e-8, 1e-10),
            Err(Error::StepUnderflow { .. })
        ));

        let out = rkf45_integrate(&oscillator_problem(), 1e-10, 1e-12).unwrap();
        let end = &out.last().unwrap().y;
        assert_abs_diff_eq!(end[0], 1.0, epsilon = 1e-7);
        assert_abs_diff_eq!(end[1], 0.0, epsilon = 1e-7);
    }

    #[test]
    fn rkf45_agrees_with_rk4() {
        let rel_tol = 1e-10;
        let a = rkf45_integrate(&oscillator_problem(), rel_tol, 1e-12).unwrap();
        let b = rk4_integrate(&oscillator_problem(), 1e-3).unwrap();
        let (ya, yb) = (&a.last().unwrap().y, &b.last().unwrap().y);
        for i in 0..2 {
            assert!((ya[i] - yb[i]).abs() <= (rel_tol * 10.0).max(1e-9));
        }
    }

    #[test]
    fn rkf45_rejects_bad_tolerances() {
        assert!(rkf45_integrate(&exp_problem(1.0), 0.0, 1e-9).is_err());
    }

    #[test]
    fn problem_validation() {
        let rhs = |_: f64, _: &[f64], _: &mut [f64]| Ok(());
        assert!(OdeProblem::new(rhs, 1.0, vec![0.0], 1.0).is_err());
        assert!(OdeProblem::new(rhs, 0.0, vec![f64::NAN], 1.0).is_err());
    }

    #[test]
    fn central_diff_examples() {
        assert_abs_diff_eq!(
            central_diff(|t| t * t, 3.0, 1e-4, DiffOrder::First),
            6.0,
            epsilon = 1e-7
        );
        for &t in &[-2.0, 0.0, 0.5, 7.0] {
            assert_abs_diff_eq!(central_diff(|t| t * t, t, 1e-2, DiffOrder::Second), 2.0, epsilon = 1e-9);
        }
        assert_abs_diff_eq!(central_diff(f64::sin, 0.0, 1e-4, DiffOrder::First), 1.0, epsilon = 1e-8);
    }

    #[test]
    fn central_diff_is_second_order() {
        let err = |h: f64| (central_diff(f64::sin, 1.0, h, DiffOrder::First) - 1f64.cos()).abs();
        assert!(err(1e-2) / err(5e-3) >= 3.5);
    }

    #[test]
    fn try_central_diff_propagates_failure() {
        let f = |t: f64| if t > 1.0 { Err("out") } else { Ok(t) };
        assert_eq!(try_central_diff(f, 1.0, 0.1, DiffOrder::First), Err("out"));
    }

    #[test]
    fn aggregate_examples() {
        let r = aggregate_residuals(&[0.0, 0.0, 0.0], 1e-8, "m", BTreeMap::new()).unwrap();
        assert!(r.pass);
        assert_eq!(r.max_residual, 0.0);

        let r = aggregate_residuals(&[1e-3], 1e-8, "m", BTreeMap::new()).unwrap();
        assert!(!r.pass);
        assert_eq!(r.max_residual, 1e-3);

        let r = aggregate_residuals(&[3.0, -4.0], 10.0, "m", BTreeMap::new()).unwrap();
        assert_eq!((r.max_residual, r.l2_residual, r.pass), (4.0, 5.0, true));

        assert!(matches!(
            aggregate_residuals(&[], 1.0, "m", BTreeMap::new()),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn report_json_has_exact_fields() {
        let mut params = BTreeMap::new();
        params.insert("m".to_string(), 1.0);
        let r = aggregate_residuals(&[3.0, 4.0], 10.0, "oscillator", params).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        let mut keys: Vec<_> = v.as_object().unwrap().keys().cloned().collect();
        keys.sort();
        assert_eq!(
            keys,
            [
                "l2_residual",
                "max_residual",
                "model",
                "n_samples",
                "params",
                "pass",
                "tolerance"
            ]
        );
    }

    proptest::proptest! {
        #[test]
        fn l2_bounded_by_max(samples in proptest::collection::vec(-1e3f64..1e3, 1..50)) {
            let r = aggregate_residuals(&samples, 1.0, "p", BTreeMap::new()).unwrap();
            proptest::prop_assert!(r.l2_residual <= r.max_residual * (r.n_samples as f64).sqrt() * (1.0 + 1e-12));
            proptest::prop_assert_eq!(r.pass, r.max_residual <= 1.0);
        }
    }
}
