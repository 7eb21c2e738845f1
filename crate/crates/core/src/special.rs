//! Special functions used by the closed-form profiles.
//!
//! The principal branch `W0` of the Lambert function (the inverse of `w -> w e^w`
//! on `[-1, inf)`) and a clamped arccos that tolerates round-off just outside
//! `[-1, 1]`.

use std::f64::consts::E;

use serde::Serialize;

use crate::error::{Error, Result};

/// `-1/e`, the branch point of the Lambert function.
pub const BRANCH_POINT: f64 = -0.367_879_441_171_442_33;

/// Inputs this far below the branch point are still treated as the branch point.
pub const BRANCH_SLACK: f64 = 1e-15;

const MAX_HALLEY_ITERATIONS: usize = 64;

/// Below this distance (in the `p = sqrt(2(e y + 1))` variable) the branch-point
/// series is already exact to double precision and Halley's step degenerates.
const BRANCH_SERIES_CUTOFF: f64 = 1e-3;

/// One evaluation of `W0` together with its defining-identity residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LambertEval {
    pub y: f64,
    pub w: f64,
    /// `|w e^w - y|`
    pub residual: f64,
}

impl LambertEval {
    pub fn new(y: f64) -> Result<Self> {
        let w = lambert_w0(y)?;
        Ok(Self {
            y,
            w,
            residual: (w * w.exp() - y).abs(),
        })
    }
}

/// Principal branch of the Lambert W function.
///
/// Starts from a series near zero, a series around the branch point `-1/e`,
/// or the log-log asymptote for large `y`, then polishes with Halley's method.
/// Inputs in `[-1/e - 1e-15, -1/e)` are clamped onto the branch point.
pub fn lambert_w0(y: f64) -> Result<f64> {
    if y.is_nan() || y < BRANCH_POINT - BRANCH_SLACK {
        return Err(Error::Domain(format!("lambert_w0 requires y >= -1/e, got {y}")));
    }
    if y == 0.0 {
        return Ok(0.0);
    }
    if y == f64::INFINITY {
        return Ok(f64::INFINITY);
    }

    let p = (2.0 * (E * y + 1.0)).max(0.0).sqrt();
    if y < 0.0 && p < BRANCH_SERIES_CUTOFF {
        return Ok(branch_point_series(p));
    }

    let mut w = initial_guess(y, p);
    for _ in 0..MAX_HALLEY_ITERATIONS {
        let ew = w.exp();
        let f = w * ew - y;
        let wp1 = w + 1.0;
        let step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
        w -= step;
        if step.abs() <= 4.0 * f64::EPSILON * (1.0 + w.abs()) {
            break;
        }
    }
    Ok(w)
}

fn initial_guess(y: f64, p: f64) -> f64 {
    if y < -0.25 {
        -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p * p * p
    } else if y.abs() < 1e-3 {
        y - y * y + 1.5 * y * y * y
    } else if y < 3.0 {
        y.ln_1p()
    } else {
        let l1 = y.ln();
        let l2 = l1.ln();
        l1 - l2 + l2 / l1
    }
}

fn branch_point_series(p: f64) -> f64 {
    // W0(y) = -1 + p - p^2/3 + 11/72 p^3 - 43/540 p^4 + 769/17280 p^5 - ...
    const COEFFS: [f64; 6] = [-1.0, 1.0, -1.0 / 3.0, 11.0 / 72.0, -43.0 / 540.0, 769.0 / 17280.0];
    COEFFS.iter().rev().fold(0.0, |acc, c| acc * p + c)
}

/// `arccos(clamp(x, -1, 1))`, rejecting inputs more than `tol` outside `[-1, 1]`.
pub fn acos_clamped(x: f64, tol: f64) -> Result<f64> {
    if x.is_nan() || x.abs() > 1.0 + tol {
        return Err(Error::Domain(format!(
            "acos argument {x} outside [-1, 1] beyond tolerance {tol:e}"
        )));
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}
