use thiserror::Error;

use crate::model::Violation;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("inadmissible parameters: {}", format_violations(.0))]
    InvalidParams(Vec<Violation>),

    #[error("{what} must be positive, got {value}")]
    NonPositive { what: &'static str, value: f64 },

    #[error("{what} must be finite, got {value}")]
    NonFinite { what: &'static str, value: f64 },

    #[error("G inverse did not converge for y = {y} after {iterations} iterations")]
    NewtonNoConvergence { y: f64, iterations: usize },

    #[error("(p0, 0) is not a saddle: f'(p0) = {f_prime_p0} >= 0")]
    DegenerateSaddle { f_prime_p0: f64 },

    #[error("wave speed too small: mu = {mu} <= 2 sqrt(nu) = {threshold}")]
    SpeedBelowMinimum { mu: f64, threshold: f64 },

    #[error("span exceeded: p = {p} > p_stop after integrating over {span}")]
    SpanExceeded { span: f64, p: f64 },

    #[error("monotonicity violated at xi = {xi}: p = {p}, q = {q}")]
    MonotonicityViolated { xi: f64, p: f64, q: f64 },

    #[error("step size underflow at xi = {xi}")]
    StepSizeUnderflow { xi: f64 },

    #[error("insufficient tail for {quantity}: {efolds:.2} e-foldings in the fit window (need 10)")]
    InsufficientTail { quantity: &'static str, efolds: f64 },

    #[error("w_plus = {w_plus} outside J = [{lo}, {hi}]")]
    WeightOutsideJ { w_plus: f64, lo: f64, hi: f64 },

    #[error("restriction R1 fails: J has empty interior")]
    R1Fails,

    #[error("singularity guard: {detail}")]
    SingularityGuard { detail: String },

    #[error("CFL violated: dt = {dt} exceeds bound {bound}")]
    CflViolated { dt: f64, bound: f64 },

    #[error("grid mismatch: {detail}")]
    GridMismatch { detail: String },

    #[error("invalid grid: {detail}")]
    InvalidGrid { detail: String },

    #[error("window [{lo}, {hi}] outside usable grid range [{min}, {max}]")]
    WindowOutsideGrid { lo: f64, hi: f64, min: f64, max: f64 },

    #[error("invalid option: {detail}")]
    InvalidOption { detail: String },

    #[error("config error at `{key}`: {detail}")]
    Config { key: String, detail: String },

    #[error("io error: {0}")]
    Io(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
