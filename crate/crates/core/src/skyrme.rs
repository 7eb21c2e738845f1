//! Restricted baby Skyrme model with the Mexican-hat potential
//! `V = λ3 (ω ω* - γ²)²`.
//!
//! Under the hedgehog ansatz `ω = tan(f(r)/2) e^{iNθ}` the Bogomolny
//! decomposition reduces to the radial equation
//!
//! ```text
//! (cos f + 1) N f' sin f / r = sqrt(λ3/β) [cos f (γ² + 1) + γ² - 1]
//! ```
//!
//! solved in closed form by `f = π - arccos(X1)` where `X1` is built from the
//! principal Lambert function evaluated at `X2 > 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::oracle::{rkf45_integrate, try_central_diff, DiffOrder, OdeProblem};
use crate::special::{acos_clamped, lambert_w0};

/// Largest exponent handed to `exp` before reporting overflow.
pub const MAX_EXPONENT: f64 = 700.0;

/// How far `X1` may stray outside `[-1, 1]` before the profile is declared undefined.
pub const PROFILE_TOLERANCE: f64 = 1e-9;

/// Radii at or below this are singular for the radial equation.
pub const MIN_RADIUS: f64 = 1e-10;

/// `sin f (1 + cos f)` below this aborts integration of the profile.
pub const DEGENERACY_FLOOR: f64 = 1e-10;

/// Default finite-difference step for the radial residual.
pub const RADIAL_STEP: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SkyrmeParams {
    pub beta: f64,
    pub lambda3: f64,
    pub gamma: f64,
    pub n: i32,
    pub c_int: f64,
}

impl SkyrmeParams {
    pub fn new(beta: f64, lambda3: f64, gamma: f64, n: i32, c_int: f64) -> Result<Self> {
        for (name, v) in [("beta", beta), ("lambda3", lambda3), ("gamma", gamma)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if n == 0 {
            return Err(Error::InvalidParameter("winding number N must be nonzero".into()));
        }
        if !c_int.is_finite() {
            return Err(Error::InvalidParameter(format!("c_int must be finite, got {c_int}")));
        }
        Ok(Self {
            beta,
            lambda3,
            gamma,
            n,
            c_int,
        })
    }

    /// `γ = 2, N = 1, λ3 = 1, β = 1, c_int = 1`, the parameter set of the plotted profile.
    pub fn reference() -> Self {
        Self {
            beta: 1.0,
            lambda3: 1.0,
            gamma: 2.0,
            n: 1,
            c_int: 1.0,
        }
    }

    fn g2(&self) -> f64 {
        self.gamma * self.gamma
    }

    /// `sqrt(β) N`
    fn bn(&self) -> f64 {
        self.beta.sqrt() * f64::from(self.n)
    }

    /// Far-field value of `cos f`: the zero of the bracket `cos f (γ²+1) + γ² - 1`.
    pub fn vacuum_cos(&self) -> f64 {
        -(self.g2() - 1.0) / (self.g2() + 1.0)
    }

    /// Profile angle of the vacuum, a fixed point of the radial equation.
    pub fn vacuum_angle(&self) -> f64 {
        self.vacuum_cos().acos()
    }

    fn describe(&self) -> String {
        format!(
            "beta = {}, lambda3 = {}, gamma = {}, N = {}, c_int = {}",
            self.beta, self.lambda3, self.gamma, self.n, self.c_int
        )
    }

    fn checked_exp(&self, exponent: f64) -> Result<f64> {
        if exponent > MAX_EXPONENT || exponent.is_nan() {
            return Err(Error::Overflow {
                exponent,
                params: self.describe(),
            });
        }
        Ok(exponent.exp())
    }

    fn x2_exponent(&self, r: f64) -> f64 {
        let bn = self.bn();
        let g2p1 = self.g2() + 1.0;
        (bn * (self.g2() - 1.0) - g2p1 * g2p1 * (r * r + 2.0 * self.c_int) * self.lambda3.sqrt() / 2.0) / (2.0 * bn)
    }

    /// Derivative of the `X2` exponent with respect to `r`.
    fn x2_exponent_dr(&self, r: f64) -> f64 {
        let g2p1 = self.g2() + 1.0;
        -g2p1 * g2p1 * self.lambda3.sqrt() * r / (2.0 * self.bn())
    }
}

fn check_radius(r: f64) -> Result<()> {
    if !(r >= 0.0 && r.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "radius must be finite and >= 0, got {r}"
        )));
    }
    Ok(())
}

/// `X2 = ½ exp((√β N (γ²-1) - (γ²+1)² (r² + 2c) √λ3 / 2) / (2 √β N))`, always positive.
pub fn x2_value(p: &SkyrmeParams, r: f64) -> Result<f64> {
    check_radius(r)?;
    Ok(0.5 * p.checked_exp(p.x2_exponent(r))?)
}

/// `X1`, evaluated from the printed closed form
/// `(γ² - exp((−4 W(X2) √β N − (γ²+1)² (r²+2c) √λ3 + 2N(γ²−1)√β) / (4√β N)) − 1) / (γ²+1)`.
pub fn x1_value(p: &SkyrmeParams, r: f64) -> Result<f64> {
    let w = lambert_w0(x2_value(p, r)?)?;
    let bn = p.bn();
    let g2p1 = p.g2() + 1.0;
    let exponent = (-4.0 * w * bn - g2p1 * g2p1 * (r * r + 2.0 * p.c_int) * p.lambda3.sqrt()
        + 2.0 * f64::from(p.n) * (p.g2() - 1.0) * p.beta.sqrt())
        / (4.0 * bn);
    Ok((p.g2() - p.checked_exp(exponent)? - 1.0) / g2p1)
}

/// `dX1/dr` by the chain rule through `W' = W / (y (1 + W))`.
///
/// The exponential term of `X1` equals `2 W(X2)`, so
/// `dX1/dr = -2 W/(1+W) · d(ln X2)/dr / (γ²+1)`.
pub fn x1_derivative(p: &SkyrmeParams, r: f64) -> Result<f64> {
    let w = lambert_w0(x2_value(p, r)?)?;
    let dw_dr = w / (1.0 + w) * p.x2_exponent_dr(r);
    Ok(-2.0 * dw_dr / (p.g2() + 1.0))
}

/// Profile `f(r) = π - arccos(X1) ∈ [0, π]`.
pub fn closed_form_f(p: &SkyrmeParams, r: f64) -> Result<f64> {
    let x1 = x1_value(p, r)?;
    let acos = acos_clamped(x1, PROFILE_TOLERANCE).map_err(|_| Error::ProfileDomain { x1 })?;
    Ok(PI - acos)
}

/// Analytic `f'(r) = X1' / sqrt(1 - X1²)`.
pub fn closed_form_fprime(p: &SkyrmeParams, r: f64) -> Result<f64> {
    let x1 = x1_value(p, r)?;
    let s = 1.0 - x1 * x1;
    if s <= 0.0 {
        return Err(Error::ProfileDomain { x1 });
    }
    Ok(x1_derivative(p, r)? / s.sqrt())
}

/// The reference profile written out for `γ = 2, N = 1, λ3 = 1, β = 1`:
/// `π - arccos((3 - exp(-25/4 r² - 11 - W(½ exp(-25/4 r² - 11)))) / 5)`.
pub fn specialized_f(r: f64) -> Result<f64> {
    check_radius(r)?;
    let a = -25.0 / 4.0 * r * r - 11.0;
    let w = lambert_w0(0.5 * a.exp())?;
    let x1 = (3.0 - (a - w).exp()) / 5.0;
    Ok(PI - acos_clamped(x1, PROFILE_TOLERANCE)?)
}

/// Left-minus-right residual of the radial equation for given `f(r)`, `f'(r)`.
pub fn radial_ode_residual_with_derivative(p: &SkyrmeParams, r: f64, f: f64, fprime: f64) -> Result<f64> {
    if !(r > MIN_RADIUS) {
        return Err(Error::Singularity { r });
    }
    let (sin, cos) = f.sin_cos();
    let lhs = (cos + 1.0) * f64::from(p.n) * fprime * sin / r;
    let rhs = (p.lambda3 / p.beta).sqrt() * (cos * (p.g2() + 1.0) + p.g2() - 1.0);
    Ok(lhs - rhs)
}

/// Radial residual of a profile function, with `f'` from a central difference of step `h`.
pub fn radial_ode_residual<F>(p: &SkyrmeParams, f: F, r: f64, h: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(r > MIN_RADIUS) {
        return Err(Error::Singularity { r });
    }
    let fprime = try_central_diff(&f, r, h, DiffOrder::First)?;
    radial_ode_residual_with_derivative(p, r, f(r)?, fprime)
}

/// Radial residual of the closed form using the analytic derivative.
pub fn closed_form_ode_residual(p: &SkyrmeParams, r: f64) -> Result<f64> {
    radial_ode_residual_with_derivative(p, r, closed_form_f(p, r)?, closed_form_fprime(p, r)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileSample {
    pub r: f64,
    pub f: f64,
    pub x1: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RadialProfile {
    pub samples: Vec<ProfileSample>,
}

/// `f' = r sqrt(λ3/β) [cos f (γ²+1) + γ² - 1] / (N sin f (1 + cos f))`.
fn profile_slope(p: &SkyrmeParams, r: f64, f: f64) -> Result<f64> {
    let (sin, cos) = f.sin_cos();
    let denom = sin * (1.0 + cos);
    if denom.abs() < DEGENERACY_FLOOR {
        return Err(Error::Degenerate { f });
    }
    Ok(r * (p.lambda3 / p.beta).sqrt() * (cos * (p.g2() + 1.0) + p.g2() - 1.0) / (f64::from(p.n) * denom))
}

/// Integrates the radial equation with RKF45 from `f(r0) = f0` to `r_end`.
pub fn integrate_profile(p: &SkyrmeParams, r0: f64, f0: f64, r_end: f64, rel_tol: f64) -> Result<RadialProfile> {
    if !(r0 > 0.0) {
        return Err(Error::Singularity { r: r0 });
    }
    if (f0.sin() * (1.0 + f0.cos())).abs() < 1e-8 {
        return Err(Error::Degenerate { f: f0 });
    }
    let problem = OdeProblem::new(
        |r, y: &[f64], dy: &mut [f64]| {
            dy[0] = profile_slope(p, r, y[0])?;
            Ok(())
        },
        r0,
        vec![f0],
        r_end,
    )?;
    let samples = rkf45_integrate(&problem, rel_tol, rel_tol * 1e-2)?
        .into_iter()
        .map(|s| ProfileSample {
            r: s.t,
            f: s.y[0],
            x1: -s.y[0].cos(),
        })
        .collect();
    Ok(RadialProfile { samples })
}

/// Hamiltonian density `-4β J² / (1 + |ω|²)⁴ + λ3 (|ω|² - γ²)²` of a hedgehog profile.
///
/// For `ω = ρ(r) e^{iNθ}` with `ρ = tan(f/2)` the Jacobian
/// `J = ω_x ω*_y - ω_y ω*_x` is `-2iN ρ ρ' / r`, purely imaginary.
pub fn hamiltonian_density(p: &SkyrmeParams, r: f64, f: f64, fprime: f64) -> Result<f64> {
    if !(r > MIN_RADIUS) {
        return Err(Error::Singularity { r });
    }
    let (sin, cos) = f.sin_cos();
    if 1.0 + cos <= f64::EPSILON {
        return Err(Error::Degenerate { f });
    }
    let rho = sin / (1.0 + cos);
    let rho_prime = fprime / (1.0 + cos);
    let jacobian_im = -2.0 * f64::from(p.n) * rho * rho_prime / r;
    let modulus2 = (1.0 - cos) / (1.0 + cos);
    let one_plus = 1.0 + modulus2;
    let kinetic = 4.0 * p.beta * jacobian_im * jacobian_im / one_plus.powi(4);
    Ok(kinetic + potential(p, modulus2))
}

/// `λ3 (|ω|² - γ²)²`
pub fn potential(p: &SkyrmeParams, modulus2: f64) -> f64 {
    let d = modulus2 - p.g2();
    p.lambda3 * d * d
}

/// The Cartesian density evaluated directly from a field `ω(x, y)` with
/// central differences of step `h`; no ansatz is assumed.
pub fn cartesian_hamiltonian_density<W>(p: &SkyrmeParams, omega: W, x: f64, y: f64, h: f64) -> Complex64
where
    W: Fn(f64, f64) -> Complex64,
{
    let w_x = (omega(x + h, y) - omega(x - h, y)) / (2.0 * h);
    let w_y = (omega(x, y + h) - omega(x, y - h)) / (2.0 * h);
    let jacobian = w_x * w_y.conj() - w_y * w_x.conj();
    let w = omega(x, y);
    let one_plus = 1.0 + w.norm_sqr();
    -4.0 * p.beta * jacobian * jacobian / one_plus.powi(4) + potential(p, w.norm_sqr())
}

/// Hedgehog field `ω(x, y) = tan(f(r)/2) e^{iNθ}` built from a radial profile.
pub fn hedgehog_field<F>(p: &SkyrmeParams, f: F) -> impl Fn(f64, f64) -> Complex64
where
    F: Fn(f64) -> f64,
{
    let n = f64::from(p.n);
    move |x: f64, y: f64| {
        let r = x.hypot(y);
        let theta = y.atan2(x);
        let fr = f(r);
        Complex64::from_polar(1.0, n * theta) * (fr.sin() / (1.0 + fr.cos()))
    }
}

/// `(|cos f(r_probe) - cos f_vacuum|, H(r_probe))`; both vanish for a profile that
/// settles onto the Mexican-hat vacuum.
pub fn boundary_limits_check(p: &SkyrmeParams, r_probe: f64) -> Result<(f64, f64)> {
    let f = closed_form_f(p, r_probe)?;
    let f_limit_residual = (f.cos() - p.vacuum_cos()).abs();
    let h_limit = hamiltonian_density(p, r_probe, f, closed_form_fprime(p, r_probe)?)?;
    Ok((f_limit_residual, h_limit))
}

/// One row of the radial profile table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProfileRow {
    pub r: f64,
    pub f: f64,
    pub x1: f64,
    pub ode_residual: f64,
    pub energy_density: f64,
}

/// Closed-form profile at `samples` uniform radii on `[0, r_max]`.
///
/// `ode_residual` uses a central-difference `f'` with step [`RADIAL_STEP`];
/// `energy_density` uses the analytic derivative. Both are `NaN` at `r = 0`,
/// where the radial equation is singular.
pub fn closed_form_table(p: &SkyrmeParams, r_max: f64, samples: usize) -> Result<Vec<ProfileRow>> {
    if samples < 2 || !(r_max > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "profile table needs r_max > 0 and at least 2 samples, got r_max = {r_max}, samples = {samples}"
        )));
    }
    (0..samples)
        .map(|i| {
            let r = r_max * i as f64 / (samples - 1) as f64;
            let f = closed_form_f(p, r)?;
            let x1 = x1_value(p, r)?;
            let (ode_residual, energy_density) = if r > MIN_RADIUS {
                (
                    radial_ode_residual(p, |s| closed_form_f(p, s), r, RADIAL_STEP.min(r / 2.0))?,
                    hamiltonian_density(p, r, f, closed_form_fprime(p, r)?)?,
                )
            } else {
                (f64::NAN, f64::NAN)
            };
            Ok(ProfileRow {
                r,
                f,
                x1,
                ode_residual,
                energy_density,
            })
        })
        .collect()
}
