use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use cauchy_core::export::{write_field_grid_csv, write_profile_csv, write_trajectory_csv};
use cauchy_core::heisenberg::{
    build_decomposition, cr_residual, evaluate_fields, field_grid, laplacians, BoundaryPolynomial, Domain,
    GRADIENT_STEP, LAPLACIAN_STEP,
};
use cauchy_core::oracle::aggregate_residuals;
use cauchy_core::oscillator::{euler_lagrange_residual, GaugeSign, OscillatorProblem};
use cauchy_core::skyrme::{
    boundary_limits_check, cartesian_hamiltonian_density, closed_form_f, closed_form_fprime, closed_form_ode_residual,
    closed_form_table, hamiltonian_density, hedgehog_field, integrate_profile, radial_ode_residual, specialized_f,
    SkyrmeParams, RADIAL_STEP,
};
use cauchy_core::ResidualReport;
use serde::Serialize;
use serde_json::Value;
use thiserror::Error;

use crate::config::{Action, HeisenbergArgs, ModelParams, OscillatorArgs, RunConfig, SkyrmeArgs};

// Each check's tolerance is the base tolerance times its factor; with the
// default base of 1e-6 these reproduce the documented per-check tolerances.
const INITIAL_CONDITION_SCALE: f64 = 1e-4;
const DUAL_SYSTEM_SCALE: f64 = 1e-1;
const EULER_LAGRANGE_SCALE: f64 = 10.0;
const RK4_ORACLE_SCALE: f64 = 1.0;
const CONSERVATION_SCALE: f64 = 1e-3;
const BOUNDARY_SCALE: f64 = 1e-4;
const CAUCHY_RIEMANN_SCALE: f64 = 1.0;
const LAPLACIAN_SCALE: f64 = 100.0;
const GAUGE_SCALE: f64 = 1e-6;
const ODE_FD_SCALE: f64 = 1.0;
const ODE_ANALYTIC_SCALE: f64 = 1e-3;
const RKF45_ORACLE_SCALE: f64 = 1.0;
const LIMITS_SCALE: f64 = 1e-3;
const CARTESIAN_SCALE: f64 = 100.0;
const SPECIALIZATION_SCALE: f64 = 1e-6;

const RK4_STEP: f64 = 1e-3;
const RKF45_REL_TOL: f64 = 1e-10;
const SKYRME_CHECK_POINTS: usize = 200;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("model domain error: {0}")]
    Domain(#[from] cauchy_core::Error),
    #[error("cannot write {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Domain(_) => 3,
        }
    }
}

/// The JSON document written to `--report`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub model: String,
    pub action: String,
    pub params: BTreeMap<String, Value>,
    pub reports: Vec<ResidualReport>,
    pub pass: bool,
}

impl RunReport {
    pub fn exit_code(&self) -> u8 {
        if self.pass {
            0
        } else {
            1
        }
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} {}: {}\n",
            self.model,
            self.action,
            if self.pass { "PASS" } else { "FAIL" }
        );
        for r in &self.reports {
            let _ = writeln!(
                s,
                "  [{}] {:<32} max {:.3e}  l2 {:.3e}  tol {:.1e}  n {}",
                if r.pass { "PASS" } else { "FAIL" },
                r.model,
                r.max_residual,
                r.l2_residual,
                r.tolerance,
                r.n_samples
            );
        }
        s
    }
}

/// Result of a run before anything touches the filesystem.
#[derive(Debug, Clone, PartialEq)]
pub struct Execution {
    pub report: RunReport,
    pub artifact: Option<Vec<u8>>,
}

struct Checks {
    base_tol: f64,
    params: BTreeMap<String, f64>,
    reports: Vec<ResidualReport>,
}

impl Checks {
    fn new(base_tol: f64, params: &[(&str, f64)]) -> Self {
        Self {
            base_tol,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
            reports: Vec::new(),
        }
    }

    fn push(&mut self, name: &str, scale: f64, residuals: &[f64]) -> Result<(), CliError> {
        self.reports.push(aggregate_residuals(
            residuals,
            self.base_tol * scale,
            name,
            self.params.clone(),
        )?);
        Ok(())
    }
}

fn csv_bytes(write: impl FnOnce(&mut Vec<u8>) -> cauchy_core::Result<()>) -> Result<Vec<u8>, CliError> {
    let mut buf = Vec::new();
    write(&mut buf)?;
    Ok(buf)
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn oscillator(
    args: &OscillatorArgs,
    action: Action,
    tol: f64,
) -> Result<(Vec<ResidualReport>, Option<Vec<u8>>), CliError> {
    let p = OscillatorProblem::new(args.m, args.omega, args.c1, args.x0, GaugeSign::Plus)?;
    let c2 = p.c2_from_initial()?;
    let t_turn = p.turning_time(c2);
    let t_end = args.t_end.unwrap_or(0.9 * t_turn);
    let trajectory = p.trajectory(t_end, args.samples)?;
    let mut checks = Checks::new(
        tol,
        &[
            ("m", p.m),
            ("omega", p.omega),
            ("c1", p.c1),
            ("x0", p.c3),
            ("c2", c2),
            ("t_end", t_end),
        ],
    );

    let mut dual = Vec::with_capacity(2 * trajectory.samples.len());
    for s in &trajectory.samples {
        dual.push(s.xdot - p.dual_system_rhs(s.x)?);
        if let Ok(g_x) = p.gauge_potential_dx(s.x) {
            dual.push(-p.m * p.omega * p.omega * s.x + g_x * s.xdot);
        }
    }
    checks.push("oscillator.dual_system", DUAL_SYSTEM_SCALE, &dual)?;

    if action == Action::Verify {
        let x0 = p.closed_form_x(c2, 0.0)?;
        checks.push("oscillator.initial_condition", INITIAL_CONDITION_SCALE, &[x0 - p.c3])?;

        let n = trajectory.samples.len();
        let el = trajectory.samples[1..n - 1]
            .iter()
            .map(|s| euler_lagrange_residual(|t| p.closed_form_x(c2, t), p.m, p.omega, s.t))
            .collect::<Result<Vec<_>, _>>()?;
        checks.push("oscillator.euler_lagrange", EULER_LAGRANGE_SCALE, &el)?;

        let oracle_end = t_end.min(0.9 * t_turn);
        let path = p.integrate_dual_system(oracle_end, RK4_STEP)?;
        let gaps = path
            .iter()
            .map(|&(t, x)| Ok(x - p.closed_form_x(c2, t)?))
            .collect::<Result<Vec<_>, cauchy_core::Error>>()?;
        checks.push("oscillator.rk4_oracle", RK4_ORACLE_SCALE, &gaps)?;

        let mw2 = (p.m * p.omega).powi(2);
        let drift = path
            .iter()
            .map(|&(_, x)| Ok((p.gauge_potential(x)?.powi(2) + mw2 * x * x - p.c1) / p.c1))
            .collect::<Result<Vec<_>, cauchy_core::Error>>()?;
        checks.push("oscillator.conservation", CONSERVATION_SCALE, &drift)?;
    }

    let artifact = match action {
        Action::Solve => Some(csv_bytes(|b| write_trajectory_csv(b, &trajectory))?),
        _ => None,
    };
    Ok((checks.reports, artifact))
}

fn heisenberg(
    args: &HeisenbergArgs,
    action: Action,
    tol: f64,
) -> Result<(Vec<ResidualReport>, Option<Vec<u8>>), CliError> {
    let f1 = BoundaryPolynomial::new(args.f1.0.clone())?;
    let f2 = BoundaryPolynomial::new(args.f2.0.clone())?;
    let d = build_decomposition(&f1, &f2, args.c1const);
    let domain = Domain::default();
    let xs = linspace(domain.x_min, domain.x_max, args.grid);
    let ys = linspace(domain.y_min, domain.y_max, args.grid);
    let mut checks = Checks::new(
        tol,
        &[
            ("c1const", args.c1const),
            ("degree_f1", f1.degree() as f64),
            ("degree_f2", f2.degree() as f64),
            ("grid", args.grid as f64),
        ],
    );

    if matches!(action, Action::Build | Action::Verify) {
        let mut boundary = Vec::with_capacity(2 * xs.len());
        for &x in &xs {
            let (u, v) = evaluate_fields(&d, x, 0.0)?;
            boundary.push(u - f1.eval(x));
            boundary.push(v - f2.eval(x));
        }
        checks.push("heisenberg.boundary_reproduction", BOUNDARY_SCALE, &boundary)?;
    }

    if action == Action::Verify {
        let shifted = build_decomposition(&f1, &f2, args.c1const + 1.0);
        let (mut cr, mut lap, mut gauge) = (Vec::new(), Vec::new(), Vec::new());
        for &y in &ys {
            for &x in &xs {
                let (r1, r2) = cr_residual(&d, x, y, GRADIENT_STEP)?;
                cr.extend([r1, r2]);
                let (lu, lv) = laplacians(&d, x, y, LAPLACIAN_STEP)?;
                lap.extend([lu, lv]);
                let (u0, v0) = evaluate_fields(&d, x, y)?;
                let (u1, v1) = evaluate_fields(&shifted, x, y)?;
                gauge.extend([u1 - u0, v1 - v0]);
            }
        }
        checks.push("heisenberg.cauchy_riemann", CAUCHY_RIEMANN_SCALE, &cr)?;
        checks.push("heisenberg.laplacian", LAPLACIAN_SCALE, &lap)?;
        checks.push("heisenberg.gauge_invariance", GAUGE_SCALE, &gauge)?;
    }

    let artifact = match action {
        Action::Build => {
            let mut json = serde_json::to_vec_pretty(&d).map_err(cauchy_core::Error::from)?;
            json.push(b'\n');
            Some(json)
        }
        Action::PlotData => {
            let grid = field_grid(&d, domain, args.grid)?;
            Some(csv_bytes(|b| write_field_grid_csv(b, &grid))?)
        }
        _ => None,
    };
    Ok((checks.reports, artifact))
}

fn skyrme(args: &SkyrmeArgs, action: Action, tol: f64) -> Result<(Vec<ResidualReport>, Option<Vec<u8>>), CliError> {
    let p = SkyrmeParams::new(args.beta, args.lambda3, args.gamma, args.n, args.cint)?;
    let mut checks = Checks::new(
        tol,
        &[
            ("gamma", p.gamma),
            ("n", f64::from(p.n)),
            ("lambda3", p.lambda3),
            ("beta", p.beta),
            ("cint", p.c_int),
            ("r_max", args.r_max),
        ],
    );
    let table = closed_form_table(&p, args.r_max, args.samples)?;

    match action {
        Action::Profile => {
            let fd: Vec<f64> = table.iter().skip(1).map(|row| row.ode_residual).collect();
            checks.push("skyrme.ode_residual_fd", ODE_FD_SCALE, &fd)?;
            let analytic = table
                .iter()
                .skip(1)
                .map(|row| closed_form_ode_residual(&p, row.r))
                .collect::<Result<Vec<_>, _>>()?;
            checks.push("skyrme.ode_residual_analytic", ODE_ANALYTIC_SCALE, &analytic)?;
        }
        Action::Verify => skyrme_verify(&p, args, &mut checks)?,
        _ => {}
    }

    let artifact = match action {
        Action::Profile | Action::PlotData => Some(csv_bytes(|b| write_profile_csv(b, &table))?),
        _ => None,
    };
    Ok((checks.reports, artifact))
}

fn skyrme_verify(p: &SkyrmeParams, args: &SkyrmeArgs, checks: &mut Checks) -> Result<(), CliError> {
    let r_lo = 0.25_f64.min(args.r_max / 2.0);
    let radii = linspace(r_lo, args.r_max, SKYRME_CHECK_POINTS);

    let fd = radii
        .iter()
        .map(|&r| radial_ode_residual(p, |s| closed_form_f(p, s), r, RADIAL_STEP))
        .collect::<Result<Vec<_>, _>>()?;
    checks.push("skyrme.ode_residual_fd", ODE_FD_SCALE, &fd)?;
    let analytic = radii
        .iter()
        .map(|&r| closed_form_ode_residual(p, r))
        .collect::<Result<Vec<_>, _>>()?;
    checks.push("skyrme.ode_residual_analytic", ODE_ANALYTIC_SCALE, &analytic)?;

    if !(args.r0 < args.r_max) {
        return Err(CliError::Config(format!(
            "--r0 ({}) must be below --r-max ({})",
            args.r0, args.r_max
        )));
    }
    let profile = integrate_profile(p, args.r0, closed_form_f(p, args.r0)?, args.r_max, RKF45_REL_TOL)?;
    let gaps = profile
        .samples
        .iter()
        .map(|s| Ok(s.f - closed_form_f(p, s.r)?))
        .collect::<Result<Vec<_>, cauchy_core::Error>>()?;
    checks.push("skyrme.rkf45_oracle", RKF45_ORACLE_SCALE, &gaps)?;

    let (f_limit, h_limit) = boundary_limits_check(p, args.r_probe)?;
    checks.push("skyrme.boundary_limits", LIMITS_SCALE, &[f_limit, h_limit])?;

    let field = hedgehog_field(p, |r| closed_form_f(p, r).unwrap_or(f64::NAN));
    let mut cartesian = Vec::new();
    for k in 0..3 {
        let r = r_lo + (args.r_max - r_lo) * k as f64 / 3.0;
        let theta = 0.4 + k as f64;
        let density = cartesian_hamiltonian_density(p, &field, r * theta.cos(), r * theta.sin(), 1e-5);
        let radial = hamiltonian_density(p, r, closed_form_f(p, r)?, closed_form_fprime(p, r)?)?;
        cartesian.push(density.re - radial);
        cartesian.push(density.im);
    }
    checks.push("skyrme.hamiltonian_cartesian", CARTESIAN_SCALE, &cartesian)?;

    if *p == SkyrmeParams::reference() {
        let special = linspace(0.0, args.r_max, 101)
            .into_iter()
            .map(|r| Ok(specialized_f(r)? - closed_form_f(p, r)?))
            .collect::<Result<Vec<_>, cauchy_core::Error>>()?;
        checks.push("skyrme.specialization", SPECIALIZATION_SCALE, &special)?;
    }
    Ok(())
}

/// Evaluates a configuration without touching the filesystem.
pub fn execute(config: &RunConfig) -> Result<Execution, CliError> {
    let (reports, artifact) = match &config.params {
        ModelParams::Oscillator(a) => oscillator(a, config.action, config.tolerance)?,
        ModelParams::Heisenberg(a) => heisenberg(a, config.action, config.tolerance)?,
        ModelParams::Skyrme(a) => skyrme(a, config.action, config.tolerance)?,
    };
    let pass = reports.iter().all(|r| r.pass);
    Ok(Execution {
        report: RunReport {
            model: config.model.name().to_string(),
            action: config.action.name().to_string(),
            params: config.params_json(),
            reports,
            pass,
        },
        artifact,
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Executes `config`, writes the artifact to `--out` and the JSON report to
/// `--report` when given, and prints the summary to standard output.
pub fn run(config: &RunConfig) -> Result<RunReport, CliError> {
    let Execution { report, artifact } = execute(config)?;
    if let (Some(path), Some(bytes)) = (&config.output_path, &artifact) {
        write_file(path, bytes)?;
    }
    if let Some(path) = &config.report_path {
        let mut json = serde_json::to_vec_pretty(&report).map_err(cauchy_core::Error::from)?;
        json.push(b'\n');
        write_file(path, &json)?;
    }
    print!("{}", report.summary());
    Ok(report)
}
