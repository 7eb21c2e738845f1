use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub const DEFAULT_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_SAMPLES: usize = 501;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Oscillator,
    Heisenberg,
    Skyrme,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Action {
    Solve,
    Build,
    Profile,
    Verify,
    PlotData,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::Oscillator => "oscillator",
            Model::Heisenberg => "heisenberg",
            Model::Skyrme => "skyrme",
        }
    }
}

impl Action {
    pub fn name(self) -> &'static str {
        match self {
            Action::Solve => "solve",
            Action::Build => "build",
            Action::Profile => "profile",
            Action::Verify => "verify",
            Action::PlotData => "plot-data",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OscillatorAction {
    Solve,
    Verify,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HeisenbergAction {
    Build,
    Verify,
    PlotData,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SkyrmeAction {
    Profile,
    Verify,
    PlotData,
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("must be a finite number > 0, got {s}"))
    }
}

fn finite(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("must be finite, got {s}"))
    }
}

fn nonzero(s: &str) -> Result<i32, String> {
    let v: i32 = s.parse().map_err(|e| format!("{e}"))?;
    if v == 0 {
        Err("winding number must be nonzero".into())
    } else {
        Ok(v)
    }
}

fn sample_count(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if v < 2 {
        Err(format!("need at least 2 samples, got {v}"))
    } else {
        Ok(v)
    }
}

/// Polynomial coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients(pub Vec<f64>);

/// Comma-separated coefficients in ascending degree, e.g. `0,1` for `f(x) = x`.
fn coefficients(s: &str) -> Result<Coefficients, String> {
    s.split(',')
        .map(|c| {
            let c = c.trim();
            c.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("bad coefficient '{c}'"))
        })
        .collect::<Result<_, _>>()
        .map(Coefficients)
}

#[derive(Debug, Clone, Args)]
struct Common {
    /// Artifact path (CSV or JSON, depending on the action).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON report path.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Base residual tolerance; each check scales it by a fixed factor.
    #[arg(long, default_value_t = DEFAULT_TOLERANCE, value_parser = positive)]
    tol: f64,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct OscillatorArgs {
    #[arg(long, value_parser = positive)]
    pub m: f64,
    #[arg(long, value_parser = positive)]
    pub omega: f64,
    #[arg(long, value_parser = positive)]
    pub c1: f64,
    /// Initial position x(0).
    #[arg(long, value_parser = finite)]
    pub x0: f64,
    /// End of the time window; defaults to 90% of the time to the turning point.
    #[arg(long, value_parser = positive)]
    pub t_end: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = sample_count)]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct HeisenbergArgs {
    /// Boundary data U(x, 0) as ascending-degree coefficients.
    #[arg(long, value_parser = coefficients, allow_hyphen_values = true)]
    pub f1: Coefficients,
    /// Boundary data V(x, 0) as ascending-degree coefficients.
    #[arg(long, value_parser = coefficients, allow_hyphen_values = true)]
    pub f2: Coefficients,
    /// Gauge constant C1.
    #[arg(long = "c1const", default_value_t = 0.0, value_parser = finite)]
    pub c1const: f64,
    /// Grid points per axis on [-3, 3]^2.
    #[arg(long, default_value_t = 21, value_parser = sample_count)]
    pub grid: usize,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct SkyrmeArgs {
    #[arg(long, value_parser = positive)]
    pub gamma: f64,
    #[arg(long, value_parser = nonzero)]
    pub n: i32,
    #[arg(long, value_parser = positive)]
    pub lambda3: f64,
    #[arg(long, value_parser = positive)]
    pub beta: f64,
    #[arg(long, value_parser = finite)]
    pub cint: f64,
    #[arg(long, default_value_t = 5.0, value_parser = positive)]
    pub r_max: f64,
    #[arg(long, default_value_t = DEFAULT_SAMPLES, value_parser = sample_count)]
    pub samples: usize,
    /// Starting radius of the integrated oracle profile.
    #[arg(long, default_value_t = 0.5, value_parser = positive)]
    pub r0: f64,
    /// Radius at which the far-field limits are probed.
    #[arg(long, default_value_t = 10.0, value_parser = positive)]
    pub r_probe: f64,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Harmonic oscillator dual system
    #[command(allow_negative_numbers = true)]
    Oscillator {
        #[arg(value_enum)]
        action: OscillatorAction,
        #[command(flatten)]
        args: OscillatorArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Heisenberg model Cauchy-Riemann fields from boundary data
    #[command(allow_negative_numbers = true)]
    Heisenberg {
        #[arg(value_enum)]
        action: HeisenbergAction,
        #[command(flatten)]
        args: HeisenbergArgs,
        #[command(flatten)]
        common: Common,
    },
    /// Restricted baby Skyrme radial profile
    #[command(allow_negative_numbers = true)]
    Skyrme {
        #[arg(value_enum)]
        action: SkyrmeAction,
        #[command(flatten)]
        args: SkyrmeArgs,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Debug, Parser)]
#[command(name = "cauchy", version, about = "Solve and verify Bogomolny-type Cauchy problems")]
#[command(subcommand_required = true, arg_required_else_help = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelParams {
    Oscillator(OscillatorArgs),
    Heisenberg(HeisenbergArgs),
    Skyrme(SkyrmeArgs),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub model: Model,
    pub action: Action,
    pub params: ModelParams,
    pub output_path: Option<PathBuf>,
    pub report_path: Option<PathBuf>,
    pub tolerance: f64,
}

impl RunConfig {
    /// Parameters echoed into the JSON report, keyed by flag name.
    pub fn params_json(&self) -> BTreeMap<String, Value> {
        let pairs: Vec<(&str, Value)> = match &self.params {
            ModelParams::Oscillator(a) => vec![
                ("m", json!(a.m)),
                ("omega", json!(a.omega)),
                ("c1", json!(a.c1)),
                ("x0", json!(a.x0)),
                ("t_end", json!(a.t_end)),
                ("samples", json!(a.samples)),
            ],
            ModelParams::Heisenberg(a) => vec![
                ("f1", json!(a.f1.0)),
                ("f2", json!(a.f2.0)),
                ("c1const", json!(a.c1const)),
                ("grid", json!(a.grid)),
            ],
            ModelParams::Skyrme(a) => vec![
                ("gamma", json!(a.gamma)),
                ("n", json!(a.n)),
                ("lambda3", json!(a.lambda3)),
                ("beta", json!(a.beta)),
                ("cint", json!(a.cint)),
                ("r_max", json!(a.r_max)),
                ("samples", json!(a.samples)),
                ("r0", json!(a.r0)),
                ("r_probe", json!(a.r_probe)),
            ],
        };
        let mut map: BTreeMap<String, Value> = pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect();
        map.insert("tol".into(), json!(self.tolerance));
        map
    }
}

/// Parses a full argument vector (program name first).
pub fn parse_config<I, T>(argv: I) -> Result<RunConfig, clap::Error>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv)?;
    let (model, action, params, common) = match cli.command {
        Command::Oscillator { action, args, common } => (
            Model::Oscillator,
            match action {
                OscillatorAction::Solve => Action::Solve,
                OscillatorAction::Verify => Action::Verify,
            },
            ModelParams::Oscillator(args),
            common,
        ),
        Command::Heisenberg { action, args, common } => (
            Model::Heisenberg,
            match action {
                HeisenbergAction::Build => Action::Build,
                HeisenbergAction::Verify => Action::Verify,
                HeisenbergAction::PlotData => Action::PlotData,
            },
            ModelParams::Heisenberg(args),
            common,
        ),
        Command::Skyrme { action, args, common } => (
            Model::Skyrme,
            match action {
                SkyrmeAction::Profile => Action::Profile,
                SkyrmeAction::Verify => Action::Verify,
                SkyrmeAction::PlotData => Action::PlotData,
            },
            ModelParams::Skyrme(args),
            common,
        ),
    };
    Ok(RunConfig {
        model,
        action,
        params,
        output_path: common.out,
        report_path: common.report,
        tolerance: common.tol,
    })
}
