//! Cross-module checks: closed forms against the generic numerical oracles.

use std::f64::consts::PI;

use cauchy_core::heisenberg::{
    build_decomposition, energy_density, evaluate_fields, BoundaryPolynomial, GRADIENT_STEP,
};
use cauchy_core::oracle::{central_diff, rk4_integrate, rkf45_integrate, DiffOrder, OdeProblem};
use cauchy_core::oscillator::{GaugeSign, OscillatorProblem};
use cauchy_core::skyrme::{closed_form_f, closed_form_fprime, hamiltonian_density, potential, SkyrmeParams};

#[test]
fn oscillator_dual_flow_via_generic_rk4() {
    let p = OscillatorProblem::new(1.5, 2.0, 3.0, -0.2, GaugeSign::Plus).unwrap();
    let c2 = p.c2_from_initial().unwrap();
    let t_end = 0.8 * p.turning_time(c2);
    let problem = OdeProblem::new(
        |_t: f64, y: &[f64], dy: &mut [f64]| {
            dy[0] = p.dual_system_rhs(y[0])?;
            Ok(())
        },
        0.0,
        vec![p.c3],
        t_end,
    )
    .unwrap();
    for s in rk4_integrate(&problem, 1e-3).unwrap() {
        assert!((s.y[0] - p.closed_form_x(c2, s.t).unwrap()).abs() < 1e-9, "t = {}", s.t);
    }
}

#[test]
fn oscillator_velocity_matches_difference_quotient() {
    let p = OscillatorProblem::new(0.7, 1.3, 2.0, 0.4, GaugeSign::Plus).unwrap();
    let c2 = p.c2_from_initial().unwrap();
    for i in 0..20 {
        let t = 0.05 * i as f64;
        let fd = central_diff(|s| p.closed_form_x(c2, s).unwrap(), t, 1e-6, DiffOrder::First);
        assert!((fd - p.closed_form_velocity(c2, t).unwrap()).abs() < 1e-8);
    }
}

#[test]
fn skyrme_profile_from_generic_rkf45() {
    let p = SkyrmeParams::new(1.2, 0.9, 1.7, 2, 0.3).unwrap();
    let r0 = 0.4;
    let problem = OdeProblem::new(
        |r: f64, y: &[f64], dy: &mut [f64]| {
            // f' = sqrt(λ/β) r (cos f (γ²+1) + γ² - 1) / (N sin f (1 + cos f))
            let (s, c) = y[0].sin_cos();
            let g2 = p.gamma * p.gamma;
            dy[0] = (p.lambda3 / p.beta).sqrt() * r * (c * (g2 + 1.0) + g2 - 1.0) / (f64::from(p.n) * s * (1.0 + c));
            Ok(())
        },
        r0,
        vec![closed_form_f(&p, r0).unwrap()],
        3.0,
    )
    .unwrap();
    for s in rkf45_integrate(&problem, 1e-11, 1e-13).unwrap() {
        assert!((s.y[0] - closed_form_f(&p, s.t).unwrap()).abs() < 1e-7, "r = {}", s.t);
    }
}

#[test]
fn skyrme_bps_energy_is_twice_the_potential() {
    let p = SkyrmeParams::reference();
    for i in 1..50 {
        let r = 0.1 * i as f64;
        let f = closed_form_f(&p, r).unwrap();
        let h = hamiltonian_density(&p, r, f, closed_form_fprime(&p, r).unwrap()).unwrap();
        let rho2 = (f / 2.0).tan().powi(2);
        assert!(
            (h - 2.0 * potential(&p, rho2)).abs() < 1e-10 * h.abs().max(1.0),
            "r = {r}"
        );
    }
}

#[test]
fn skyrme_far_field_reaches_vacuum_angle() {
    let p = SkyrmeParams::reference();
    let far = closed_form_f(&p, 8.0).unwrap();
    assert!((far - (PI - 0.6f64.acos())).abs() < 1e-12);
}

#[test]
fn heisenberg_identity_map_energy() {
    // w = x + iy: |∇w|² = 2, so the density is 2 / (1 + r²)².
    let d = build_decomposition(
        &BoundaryPolynomial::new(vec![0.0, 1.0]).unwrap(),
        &BoundaryPolynomial::new(vec![0.0]).unwrap(),
        0.7,
    );
    for &(x, y) in &[(0.0, 0.0), (1.0, -0.5), (-2.0, 2.5)] {
        let (u, v) = evaluate_fields(&d, x, y).unwrap();
        assert_eq!((u, v), (x, y));
        let expected = 2.0 / (1.0 + x * x + y * y).powi(2);
        assert!((energy_density(&d, x, y, GRADIENT_STEP).unwrap() - expected).abs() < 1e-9);
    }
}
