//! Harmonic oscillator `L = m/2 (x'^2 - w^2 x^2)` gauged by `G(x) x'`.
//!
//! Optimising the gauged Lagrangian separately in `x` and `x'` gives the dual
//! (Bogomolny) pair
//!
//! ```text
//! -m w^2 x + G_x x' = 0
//!  G + m x'         = 0
//! ```
//!
//! whose compatibility fixes `G = ±sqrt(c1 - m^2 w^2 x^2)`. With `x(0) = c3`
//! this is a Cauchy problem with a closed-form solution on the principal
//! branch `w (c2 - t) ∈ (-pi/2, pi/2)`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{rk4_integrate, try_central_diff, DiffOrder, OdeProblem};

/// Relative slack under the square root of `G`, absorbing round-off at the turning amplitude.
pub const TURNING_SLACK: f64 = 1e-12;

/// Phases closer than this to `±pi/2` are rejected by [`OscillatorProblem::closed_form_x`].
pub const BRANCH_MARGIN: f64 = 1e-9;

/// Finite-difference step for the Euler-Lagrange residual.
pub const EULER_LAGRANGE_STEP: f64 = 1e-4;

/// Sign branch of the gauge potential.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub enum GaugeSign {
    #[default]
    Plus,
    Minus,
}

impl GaugeSign {
    pub fn value(self) -> f64 {
        match self {
            GaugeSign::Plus => 1.0,
            GaugeSign::Minus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OscillatorProblem {
    pub m: f64,
    pub omega: f64,
    pub c1: f64,
    pub c3: f64,
    pub g_sign: GaugeSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub xdot: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<TrajectoryPoint>,
    pub c2: f64,
}

impl OscillatorProblem {
    pub fn new(m: f64, omega: f64, c1: f64, c3: f64, g_sign: GaugeSign) -> Result<Self> {
        for (name, v) in [("m", m), ("omega", omega), ("c1", c1)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if !c3.is_finite() {
            return Err(Error::InvalidParameter(format!("x(0) must be finite, got {c3}")));
        }
        let problem = Self {
            m,
            omega,
            c1,
            c3,
            g_sign,
        };
        if problem.radicand(c3) < -TURNING_SLACK * c1 {
            return Err(Error::TurningPoint {
                c3,
                amplitude: problem.amplitude(),
            });
        }
        Ok(problem)
    }

    /// Turning amplitude `sqrt(c1) / (m w)`, where `G` vanishes.
    pub fn amplitude(&self) -> f64 {
        self.c1.sqrt() / (self.m * self.omega)
    }

    fn radicand(&self, x: f64) -> f64 {
        let mw = self.m * self.omega;
        self.c1 - mw * mw * x * x
    }

    fn checked_radicand(&self, x: f64) -> Result<f64> {
        let rad = self.radicand(x);
        if rad.is_nan() || rad < -TURNING_SLACK * self.c1 {
            return Err(Error::Domain(format!(
                "|x| = {} exceeds the turning amplitude {}",
                x.abs(),
                self.amplitude()
            )));
        }
        Ok(rad.max(0.0))
    }

    /// `G(x) = ±sqrt(c1 - m^2 w^2 x^2)`.
    pub fn gauge_potential(&self, x: f64) -> Result<f64> {
        Ok(self.g_sign.value() * self.checked_radicand(x)?.sqrt())
    }

    /// `dG/dx`, which is unbounded at the turning amplitude.
    pub fn gauge_potential_dx(&self, x: f64) -> Result<f64> {
        let rad = self.checked_radicand(x)?;
        if rad == 0.0 {
            return Err(Error::Domain(format!(
                "dG/dx is unbounded at the turning point x = {x}"
            )));
        }
        let mw = self.m * self.omega;
        Ok(-self.g_sign.value() * mw * mw * x / rad.sqrt())
    }

    /// Velocity from the second dual equation, `x' = -G(x) / m`.
    pub fn dual_system_rhs(&self, x: f64) -> Result<f64> {
        Ok(-self.gauge_potential(x)? / self.m)
    }

    /// Phase constant selecting the solution through `x(0) = c3`.
    pub fn c2_from_initial(&self) -> Result<f64> {
        let rad = self.radicand(self.c3);
        if rad <= 0.0 {
            return Err(Error::TurningPoint {
                c3: self.c3,
                amplitude: self.amplitude(),
            });
        }
        Ok((self.m * self.omega * self.c3 / rad.sqrt()).atan() / self.omega)
    }

    fn phase(&self, c2: f64, t: f64) -> Result<f64> {
        let phase = self.omega * (c2 - t);
        if !(phase.abs() < FRAC_PI_2 - BRANCH_MARGIN) {
            return Err(Error::Branch { phase });
        }
        Ok(phase)
    }

    /// Closed-form trajectory evaluated exactly as printed,
    /// `sqrt(c1) tan(ph) / (w m sqrt(tan^2(ph) + 1))` with `ph = w (c2 - t)`.
    ///
    /// Only the principal branch `|ph| < pi/2` is accepted; there the formula
    /// equals `sqrt(c1)/(w m) sin(ph)`.
    pub fn closed_form_x(&self, c2: f64, t: f64) -> Result<f64> {
        let tan = self.phase(c2, t)?.tan();
        Ok(self.c1.sqrt() * tan / (self.omega * self.m * (tan * tan + 1.0).sqrt()))
    }

    /// Analytic time derivative of [`Self::closed_form_x`].
    pub fn closed_form_velocity(&self, c2: f64, t: f64) -> Result<f64> {
        Ok(-self.c1.sqrt() / self.m * self.phase(c2, t)?.cos())
    }

    /// First time after `t = 0` at which the principal-branch solution reaches its turning point.
    pub fn turning_time(&self, c2: f64) -> f64 {
        c2 + FRAC_PI_2 / self.omega
    }

    /// `samples` uniformly spaced closed-form points on `[0, t_end]`.
    pub fn trajectory(&self, t_end: f64, samples: usize) -> Result<Trajectory> {
        if samples < 2 || !(t_end > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "trajectory needs t_end > 0 and at least 2 samples, got t_end = {t_end}, samples = {samples}"
            )));
        }
        let c2 = self.c2_from_initial()?;
        let samples = (0..samples)
            .map(|i| {
                let t = t_end * i as f64 / (samples - 1) as f64;
                Ok(TrajectoryPoint {
                    t,
                    x: self.closed_form_x(c2, t)?,
                    xdot: self.closed_form_velocity(c2, t)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Trajectory { samples, c2 })
    }

    /// RK4 integration of `x' = -G(x)/m` from `x(0) = c3`; returns `(t, x)` pairs.
    pub fn integrate_dual_system(&self, t_end: f64, step: f64) -> Result<Vec<(f64, f64)>> {
        let problem = OdeProblem::new(
            |_, y: &[f64], dy: &mut [f64]| {
                dy[0] = self.dual_system_rhs(y[0])?;
                Ok(())
            },
            0.0,
            vec![self.c3],
            t_end,
        )?;
        Ok(rk4_integrate(&problem, step)?
            .into_iter()
            .map(|s| (s.t, s.y[0]))
            .collect())
    }
}

/// `m x''(t) + m w^2 x(t)`, with `x''` from a second-order central difference.
pub fn euler_lagrange_residual<F>(x: F, m: f64, omega: f64, t: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let xdd = try_central_diff(&x, t, EULER_LAGRANGE_STEP, DiffOrder::Second)?;
    Ok(m * xdd + m * omega * omega * x(t)?)
}

/// Substitutes the general Euler-Lagrange solution `A sin(w t) + B cos(w t)`
/// into both dual equations and returns `(r1, r2)`:
/// `r1 = -m w^2 x + G_x x'`, `r2 = G + m x'`.
pub fn bogomolny_residual_of_general_el(a: f64, b: f64, p: &OscillatorProblem, t: f64) -> Result<(f64, f64)> {
    let (s, c) = (p.omega * t).sin_cos();
    let x = a * s + b * c;
    let xdot = p.omega * (a * c - b * s);
    let g = p.gauge_potential(x)?;
    let g_x = p.gauge_potential_dx(x)?;
    let r1 = -p.m * p.omega * p.omega * x + g_x * xdot;
    let r2 = g + p.m * xdot;
    Ok((r1, r2))
}

/// `(t, r1, r2)` at every sample time where `A sin + B cos` stays inside the turning amplitude.
pub fn general_el_residual_sweep(a: f64, b: f64, p: &OscillatorProblem, times: &[f64]) -> Vec<(f64, f64, f64)> {
    times
        .iter()
        .filter_map(|&t| {
            bogomolny_residual_of_general_el(a, b, p, t)
                .ok()
                .map(|(r1, r2)| (t, r1, r2))
        })
        .collect()
}
