//! Error type shared by the whole engine.
//!
//! Parameter validation distinguishes shape problems (missing or unknown
//! symbols) from value problems (non-positive entries, violated structural
//! constraints); the CLI maps the former to exit code 2 and the latter to 3.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("missing parameter: {0}")]
    MissingSymbol(String),

    #[error("unknown parameter: {0}")]
    UnknownSymbol(String),

    #[error("parameter {name} must be positive, got {value}")]
    NonPositiveValue { name: String, value: f64 },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("x = {x} is outside the admissible interval ({lo}, {hi})")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("prey nullcline is nonpositive at x = {x} (g = {g})")]
    NullclineNonpositive { x: f64, g: f64 },

    #[error("no coexistence state exists at the critical point for any sampled parameter value")]
    NoCepAtCriticalPoint,

    #[error("eigenvalue crossing is degenerate: |derivative| = {0:.3e} < 1e-8")]
    DegenerateCrossing(f64),

    #[error("positivity pattern violated at x = {x}: {detail}")]
    PatternViolation { x: f64, detail: String },

    #[error("trajectory has too few samples: {got} < {need}")]
    InsufficientSamples { got: usize, need: usize },

    #[error("state became non-finite during integration")]
    NonFiniteState,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by the shape of a configuration document
    /// rather than by parameter values.
    pub fn is_config_shape(&self) -> bool {
        matches!(
            self,
            Error::Config(_) | Error::MissingSymbol(_) | Error::UnknownSymbol(_) | Error::Json(_)
        )
    }
}
