use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("exponent p must be finite and greater than 1, got {0}")]
    InvalidExponent(f64),

    #[error("invalid {name}: {reason} (got {value})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("weight `{name}` is not strictly positive (minimum {min})")]
    NonPositiveWeight { name: String, min: f64 },

    #[error("unknown weight preset `{0}`")]
    UnknownPreset(String),

    #[error("weight preset `{name}` expects {expected} parameter(s), got {got}")]
    PresetArity { name: String, expected: usize, got: usize },

    #[error("the Prüfer phase system needs a differentiable weight; use the direct integrator for piecewise data")]
    RequiresSmoothWeight,

    #[error("step size underflow at x = {x} (h = {h:e}); the system is too stiff for the requested tolerance")]
    StepUnderflow { x: f64, h: f64 },

    #[error("non-finite state encountered at x = {x}")]
    NonFiniteState { x: f64 },

    #[error("integrator exceeded {0} steps")]
    TooManySteps(usize),

    #[error("could not bracket eigenvalue {k} (searched [{lo}, {hi}])")]
    BracketFailure { k: usize, lo: f64, hi: f64 },

    #[error("bisection did not converge within {0} iterations")]
    MaxIterations(usize),

    #[error("the finite-difference oracle only handles p = 2 (got p = {0})")]
    OracleNeedsLinear(f64),

    #[error("inverse of the coefficient primitive failed at y = {0}")]
    InversionFailure(f64),

    #[error("test function must vanish at both endpoints (v(0) = {left}, v(1) = {right})")]
    EndpointsNotZero { left: f64, right: f64 },

    #[error("unknown figure id {0} (expected 1-4)")]
    UnknownFigure(u32),

    #[error("rate fit needs at least {needed} points above the noise floor, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("configuration error in `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
