//! Heisenberg continuous model: Cauchy-Riemann fields from boundary data.
//!
//! With `w = U + iV` the first-order dual equations reduce to
//! `V_y - U_x = 0`, `V_x + U_y = 0`, whose general solution is
//!
//! ```text
//! U = F1(y - ix) + F2(y + ix)
//! V = -i F1(y - ix) + i F2(y + ix) + C1
//! ```
//!
//! Prescribing `U(x, 0) = f1(x)`, `V(x, 0) = f2(x)` pins `F1`, `F2` up to the
//! gauge constant `C1`:
//!
//! ```text
//! F1(-ix) = (f1(x) + i (f2(x) - C1)) / 2
//! F2( ix) = (f1(x) - i (f2(x) - C1)) / 2
//! ```
//!
//! Boundary data are real polynomials, so `F1`, `F2` follow by formal
//! substitution `x = iz` (resp. `x = -iz`) with exact powers of `i`.

use num_complex::Complex64;
use serde::Serialize;
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::oracle::{try_central_diff, DiffOrder};

/// Largest imaginary residue tolerated when reading `U`, `V` off the complex combinations.
pub const REALITY_TOLERANCE: f64 = 1e-10;

/// Step for first-derivative residuals.
pub const GRADIENT_STEP: f64 = 1e-5;

/// Step for Laplacians.
pub const LAPLACIAN_STEP: f64 = 1e-4;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Real polynomial in ascending-degree coefficients.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryPolynomial {
    coefficients: Vec<f64>,
}

impl BoundaryPolynomial {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidParameter(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite polynomial coefficient {bad}"
            )));
        }
        Ok(Self { coefficients })
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        self.coefficients
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
    }
}

/// Complex polynomial in ascending-degree coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPolynomial {
    pub coefficients: Vec<Complex64>,
}

/// Complex value carried in double-double precision.
#[derive(Debug, Clone, Copy)]
struct WideComplex {
    re: TwoFloat,
    im: TwoFloat,
}

impl WideComplex {
    fn add(self, other: Self) -> Self {
        Self {
            re: self.re + other.re,
            im: self.im + other.im,
        }
    }

    fn round(self) -> Complex64 {
        Complex64::new(f64::from(self.re), f64::from(self.im))
    }
}

impl ComplexPolynomial {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.eval_wide(z).round()
    }

    // Horner in double-double: finite-difference stencils of the fields then
    // see values rounded once rather than after every step.
    fn eval_wide(&self, z: Complex64) -> WideComplex {
        let zero = WideComplex {
            re: TwoFloat::from(0.0),
            im: TwoFloat::from(0.0),
        };
        self.coefficients.iter().rev().fold(zero, |acc, c| WideComplex {
            re: acc.re * z.re - acc.im * z.im + c.re,
            im: acc.re * z.im + acc.im * z.re + c.im,
        })
    }
}

impl Serialize for ComplexPolynomial {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let re: Vec<f64> = self.coefficients.iter().map(|c| c.re).collect();
        let im: Vec<f64> = self.coefficients.iter().map(|c| c.im).collect();
        let mut s = serializer.serialize_struct("ComplexPolynomial", 2)?;
        s.serialize_field("re", &re)?;
        s.serialize_field("im", &im)?;
        s.end()
    }
}

/// `(F1, F2, C1)` defining `U` and `V`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolomorphicDecomposition {
    #[serde(rename = "F1")]
    pub f1: ComplexPolynomial,
    #[serde(rename = "F2")]
    pub f2: ComplexPolynomial,
    #[serde(rename = "C1")]
    pub c1: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpinVector {
    pub sx: f64,
    pub sy: f64,
    pub sz: f64,
}

impl SpinVector {
    pub fn new(sx: f64, sy: f64, sz: f64) -> Result<Self> {
        let norm2 = sx * sx + sy * sy + sz * sz;
        if !((norm2 - 1.0).abs() <= 1e-12) {
            return Err(Error::InvalidParameter(format!(
                "spin must be a unit vector, |S|^2 = {norm2}"
            )));
        }
        Ok(Self { sx, sy, sz })
    }
}

/// `w = (Sx + i Sy) / (1 + Sz)`.
pub fn stereographic_w(s: &SpinVector) -> Result<Complex64> {
    if s.sz <= -1.0 + 1e-12 {
        return Err(Error::SouthPole { sz: s.sz });
    }
    Ok(Complex64::new(s.sx, s.sy) / (1.0 + s.sz))
}

/// Coefficients of `p(u z)` for a real polynomial `p` and a unit `u` (here `±i`).
fn substitute(p: &BoundaryPolynomial, unit: Complex64) -> Vec<Complex64> {
    let mut power = Complex64::new(1.0, 0.0);
    p.coefficients()
        .iter()
        .map(|&c| {
            let term = power * c;
            power *= unit;
            term
        })
        .collect()
}

/// Solves the boundary constraints `U(x,0) = f1(x)`, `V(x,0) = f2(x)` for `F1`, `F2`.
pub fn build_decomposition(f1: &BoundaryPolynomial, f2: &BoundaryPolynomial, c1: f64) -> HolomorphicDecomposition {
    let len = f1.coefficients().len().max(f2.coefficients().len());
    let pad = |mut v: Vec<Complex64>| {
        v.resize(len, Complex64::new(0.0, 0.0));
        v
    };
    // F1(z) = (f1(iz) + i f2(iz) - i C1) / 2
    let f1_iz = pad(substitute(f1, I));
    let f2_iz = pad(substitute(f2, I));
    let mut big_f1: Vec<Complex64> = f1_iz.iter().zip(&f2_iz).map(|(a, b)| 0.5 * (a + I * b)).collect();
    big_f1[0] -= 0.5 * I * c1;

    // F2(z) = (f1(-iz) - i f2(-iz) + i C1) / 2
    let f1_miz = pad(substitute(f1, -I));
    let f2_miz = pad(substitute(f2, -I));
    let mut big_f2: Vec<Complex64> = f1_miz.iter().zip(&f2_miz).map(|(a, b)| 0.5 * (a - I * b)).collect();
    big_f2[0] += 0.5 * I * c1;

    HolomorphicDecomposition {
        f1: ComplexPolynomial { coefficients: big_f1 },
        f2: ComplexPolynomial { coefficients: big_f2 },
        c1,
    }
}

impl HolomorphicDecomposition {
    /// The two complex combinations `(U, V)` before their imaginary parts are dropped.
    pub fn complex_fields(&self, x: f64, y: f64) -> (Complex64, Complex64) {
        let a = self.f1.eval_wide(Complex64::new(y, -x));
        let b = self.f2.eval_wide(Complex64::new(y, x));
        // -i a + i b = (a.im - b.im) + i (b.re - a.re)
        let v = WideComplex {
            re: a.im - b.im + self.c1,
            im: b.re - a.re,
        };
        (a.add(b).round(), v.round())
    }
}

/// `(U(x, y), V(x, y))`.
pub fn evaluate_fields(d: &HolomorphicDecomposition, x: f64, y: f64) -> Result<(f64, f64)> {
    let (u, v) = d.complex_fields(x, y);
    let residue = u.im.abs().max(v.im.abs());
    if !(residue <= REALITY_TOLERANCE) {
        return Err(Error::RealityViolation { residue });
    }
    Ok((u.re, v.re))
}

fn field_component(d: &HolomorphicDecomposition, x: f64, y: f64, which: usize) -> Result<f64> {
    let (u, v) = evaluate_fields(d, x, y)?;
    Ok(if which == 0 { u } else { v })
}

struct Gradients {
    u_x: f64,
    u_y: f64,
    v_x: f64,
    v_y: f64,
}

fn gradients(d: &HolomorphicDecomposition, x: f64, y: f64, h: f64) -> Result<Gradients> {
    let dx = |which| try_central_diff(|s| field_component(d, s, y, which), x, h, DiffOrder::First);
    let dy = |which| try_central_diff(|s| field_component(d, x, s, which), y, h, DiffOrder::First);
    Ok(Gradients {
        u_x: dx(0)?,
        u_y: dy(0)?,
        v_x: dx(1)?,
        v_y: dy(1)?,
    })
}

/// Central-difference residuals `(V_y - U_x, V_x + U_y)` of the Cauchy-Riemann pair.
pub fn cr_residual(d: &HolomorphicDecomposition, x: f64, y: f64, h: f64) -> Result<(f64, f64)> {
    let g = gradients(d, x, y, h)?;
    Ok((g.v_y - g.u_x, g.v_x + g.u_y))
}

/// Five-point Laplacians `(ΔU, ΔV)`.
pub fn laplacians(d: &HolomorphicDecomposition, x: f64, y: f64, h: f64) -> Result<(f64, f64)> {
    let lap = |which| -> Result<f64> {
        Ok(
            try_central_diff(|s| field_component(d, s, y, which), x, h, DiffOrder::Second)?
                + try_central_diff(|s| field_component(d, x, s, which), y, h, DiffOrder::Second)?,
        )
    };
    Ok((lap(0)?, lap(1)?))
}

/// `∇w·∇w* / (1 + w w*)^2` with `w = U + iV` and finite-difference gradients.
pub fn energy_density(d: &HolomorphicDecomposition, x: f64, y: f64, h: f64) -> Result<f64> {
    let g = gradients(d, x, y, h)?;
    let (u, v) = evaluate_fields(d, x, y)?;
    let grad2 = g.u_x * g.u_x + g.v_x * g.v_x + g.u_y * g.u_y + g.v_y * g.v_y;
    let denom = 1.0 + u * u + v * v;
    Ok(grad2 / (denom * denom))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FieldSample {
    pub x: f64,
    pub y: f64,
    #[serde(rename = "U")]
    pub u: f64,
    #[serde(rename = "V")]
    pub v: f64,
    pub energy_density: f64,
}

/// Axis-aligned rectangle `[x_min, x_max] × [y_min, y_max]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

impl Default for Domain {
    fn default() -> Self {
        Self {
            x_min: -3.0,
            x_max: 3.0,
            y_min: -3.0,
            y_max: 3.0,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

/// `n × n` grid, row-major over `y` then `x`.
pub fn field_grid(d: &HolomorphicDecomposition, domain: Domain, n: usize) -> Result<Vec<FieldSample>> {
    let mut out = Vec::with_capacity(n * n);
    for j in 0..n {
        let y = linspace(domain.y_min, domain.y_max, n, j);
        for i in 0..n {
            let x = linspace(domain.x_min, domain.x_max, n, i);
            let (u, v) = evaluate_fields(d, x, y)?;
            out.push(FieldSample {
                x,
                y,
                u,
                v,
                energy_density: energy_density(d, x, y, GRADIENT_STEP)?,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn poly(c: &[f64]) -> BoundaryPolynomial {
        BoundaryPolynomial::new(c.to_vec()).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn stereographic_examples() {
        assert_eq!(
            stereographic_w(&SpinVector::new(0.0, 0.0, 1.0).unwrap()).unwrap(),
            c(0.0, 0.0)
        );
        assert_eq!(
            stereographic_w(&SpinVector::new(1.0, 0.0, 0.0).unwrap()).unwrap(),
            c(1.0, 0.0)
        );
        assert_eq!(
            stereographic_w(&SpinVector::new(0.0, 1.0, 0.0).unwrap()).unwrap(),
            c(0.0, 1.0)
        );
        assert!(matches!(
            stereographic_w(&SpinVector::new(0.0, 0.0, -1.0).unwrap()),
            Err(Error::SouthPole { .. })
        ));
        assert!(SpinVector::new(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn polynomial_evaluation() {
        let p = poly(&[1.0, -2.0, 3.0]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval(2.0), 9.0);
        assert_eq!(p.eval_complex(c(0.0, 1.0)), c(-2.0, -2.0));
        assert!(BoundaryPolynomial::new(vec![]).is_err());
        assert!(BoundaryPolynomial::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn linear_boundary_data() {
        let d = build_decomposition(&poly(&[0.0, 1.0]), &poly(&[0.0]), 0.0);
        assert_eq!(d.f1.coefficients, vec![c(0.0, 0.0), c(0.0, 0.5)]);
        assert_eq!(d.f2.coefficients, vec![c(0.0, 0.0), c(0.0, -0.5)]);
        // Substitution back into the boundary relations.
        for &x in &[-2.0, 0.3, 1.7] {
            let u0 = d.f1.eval(c(0.0, -x)) + d.f2.eval(c(0.0, x));
            let v0 = -I * d.f1.eval(c(0.0, -x)) + I * d.f2.eval(c(0.0, x)) + d.c1;
            assert_abs_diff_eq!(u0.re, x, epsilon = 1e-15);
            assert_abs_diff_eq!(u0.im, 0.0, epsilon = 1e-15);
            assert_abs_diff_eq!(v0.norm(), 0.0, epsilon = 1e-15);
        }
        for &(x, y) in &[(0.3, -1.2), (2.0, 2.5), (-1.0, 0.0)] {
            let (u, v) = evaluate_fields(&d, x, y).unwrap();
            assert_abs_diff_eq!(u, x, epsilon = 1e-12);
            assert_abs_diff_eq!(v, y, epsilon = 1e-12);
        }
    }

    #[test]
    fn constant_boundary_data() {
        let d = build_decomposition(&poly(&[1.0]), &poly(&[0.0]), 0.0);
        assert_eq!(d.f1.coefficients, vec![c(0.5, 0.0)]);
        assert_eq!(d.f2.coefficients, vec![c(0.5, 0.0)]);
        assert_eq!(evaluate_fields(&d, 0.7, -2.1).unwrap(), (1.0, 0.0));
        assert_eq!(cr_residual(&d, 0.7, -2.1, 1e-5).unwrap(), (0.0, 0.0));
        assert_eq!(energy_density(&d, 0.7, -2.1, 1e-5).unwrap(), 0.0);
    }

    #[test]
    fn gauge_constant_only() {
        let cc = 1.75;
        let d = build_decomposition(&poly(&[0.0]), &poly(&[0.0]), cc);
        assert_eq!(d.f1.coefficients, vec![c(0.0, -cc / 2.0)]);
        assert_eq!(d.f2.coefficients, vec![c(0.0, cc / 2.0)]);
        let (u, v) = evaluate_fields(&d, 1.0, 1.0).unwrap();
        assert_abs_diff_eq!(u, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(v, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn linear_cr_and_energy() {
        let d = build_decomposition(&poly(&[0.0, 1.0]), &poly(&[0.0]), 0.0);
        for &(x, y) in &[(0.0, 0.0), (1.5, -0.5), (-2.0, 2.9)] {
            let (r1, r2) = cr_residual(&d, x, y, GRADIENT_STEP).unwrap();
            assert!(r1.abs() <= 1e-9 && r2.abs() <= 1e-9);
        }
        assert_abs_diff_eq!(
            energy_density(&d, 0.0, 0.0, GRADIENT_STEP).unwrap(),
            2.0,
            epsilon = 1e-9
        );
    }

    #[test]
    fn corrupted_decomposition_detected() {
        let mut d = build_decomposition(&poly(&[0.0, 1.0]), &poly(&[0.0]), 0.0);
        d.f1.coefficients[1] = c(1.0, 0.5);
        assert!(matches!(
            evaluate_fields(&d, 1.0, 1.0),
            Err(Error::RealityViolation { .. })
        ));
    }

    #[test]
    fn grid_is_row_major_over_y() {
        let d = build_decomposition(&poly(&[0.0, 1.0]), &poly(&[0.0]), 0.0);
        let g = field_grid(&d, Domain::default(), 3).unwrap();
        let coords: Vec<_> = g.iter().map(|s| (s.x, s.y)).collect();
        assert_eq!(
            coords,
            vec![
                (-3.0, -3.0),
                (0.0, -3.0),
                (3.0, -3.0),
                (-3.0, 0.0),
                (0.0, 0.0),
                (3.0, 0.0),
                (-3.0, 3.0),
                (0.0, 3.0),
                (3.0, 3.0),
            ]
        );
    }

    #[test]
    fn decomposition_json_schema() {
        let d = build_decomposition(&poly(&[0.0, 1.0]), &poly(&[0.0]), 0.5);
        let v = serde_json::to_value(&d).unwrap();
        assert_eq!(v["C1"], 0.5);
        assert_eq!(v["F1"]["re"], serde_json::json!([0.0, 0.0]));
        assert_eq!(v["F1"]["im"], serde_json::json!([-0.25, 0.5]));
        assert_eq!(v["F2"]["im"], serde_json::json!([0.25, -0.5]));
    }

    fn coeffs() -> impl Strategy<Value = Vec<f64>> {
        proptest::collection::vec(-1.0f64..1.0, 1..=6)
    }

    proptest! {
        #[test]
        fn boundary_reproduction(a in coeffs(), b in coeffs(), c1 in -2.0f64..2.0, x in -3.0f64..3.0) {
            let (f1, f2) = (poly(&a), poly(&b));
            let d = build_decomposition(&f1, &f2, c1);
            let (u, v) = evaluate_fields(&d, x, 0.0).unwrap();
            prop_assert!((u - f1.eval(x)).abs() <= 1e-10);
            prop_assert!((v - f2.eval(x)).abs() <= 1e-10);
        }

        #[test]
        fn cauchy_riemann_holds(a in coeffs(), b in coeffs(), x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let d = build_decomposition(&poly(&a), &poly(&b), 0.3);
            let (r1, r2) = cr_residual(&d, x, y, GRADIENT_STEP).unwrap();
            prop_assert!(r1.abs() <= 1e-6 && r2.abs() <= 1e-6, "{r1} {r2}");
            prop_assert!(energy_density(&d, x, y, GRADIENT_STEP).unwrap() >= 0.0);
        }

        #[test]
        fn gauge_constant_invariance(a in coeffs(), b in coeffs(), c1 in -2.0f64..2.0, x in -3.0f64..3.0, y in -3.0f64..3.0) {
            let (f1, f2) = (poly(&a), poly(&b));
            let (u0, v0) = evaluate_fields(&build_decomposition(&f1, &f2, 0.0), x, y).unwrap();
            let (u1, v1) = evaluate_fields(&build_decomposition(&f1, &f2, c1), x, y).unwrap();
            prop_assert!((u0 - u1).abs() <= 1e-12 && (v0 - v1).abs() <= 1e-12);
        }

        #[test]
        fn stereographic_modulus(theta in 0.0f64..3.1, phi in 0.0f64..6.0) {
            let s = SpinVector::new(theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()).unwrap();
            let w = stereographic_w(&s).unwrap();
            prop_assert!((w.norm_sqr() - (1.0 - s.sz) / (1.0 + s.sz)).abs() <= 1e-12 * (1.0 + w.norm_sqr()));
        }
    }
}
