use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain of a function (Lambert W, arccos, square roots).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration blew up: non-finite state after t = {last_t}")]
    IntegrationBlowup { last_t: f64 },

    #[error("step size underflow at t = {t} (h = {h:e}); problem is stiff or singular")]
    StepUnderflow { t: f64, h: f64 },

    #[error("cannot aggregate an empty residual sample")]
    EmptyInput,

    #[error("initial position {c3} sits at or beyond the turning amplitude {amplitude}")]
    TurningPoint { c3: f64, amplitude: f64 },

    #[error("phase {phase} is outside the principal branch (-pi/2, pi/2)")]
    Branch { phase: f64 },

    #[error("spin at the south pole (sz = {sz}) has no stereographic image")]
    SouthPole { sz: f64 },

    #[error("field value has imaginary residue {residue:e}; decomposition is not conjugate-symmetric")]
    RealityViolation { residue: f64 },

    #[error("exponent {exponent} overflows double precision ({params})")]
    Overflow { exponent: f64, params: String },

    #[error("X1 = {x1} leaves [-1, 1]; profile undefined for these parameters")]
    ProfileDomain { x1: f64 },

    #[error("radial equation is singular at r = {r}")]
    Singularity { r: f64 },

    #[error("profile angle f = {f} makes sin f (1 + cos f) degenerate")]
    Degenerate { f: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
