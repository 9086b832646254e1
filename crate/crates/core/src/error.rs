use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("x-wavenumber k = 0 is not allowed here (zero mode is handled separately)")]
    ZeroWavenumber,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid initial data: {0}")]
    InvalidInitialData(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("frequency {xi} for k = {k} lies outside the stored range [{lo}, {hi}]")]
    FrequencyOutOfRange { k: i32, xi: f64, lo: f64, hi: f64 },

    #[error("step underflow (dt = {dt:e}) at t = {t}, k = {k}, eta = {eta}: stiffness or blow-up")]
    StepUnderflow { t: f64, k: i32, eta: f64, dt: f64 },

    #[error("step limit of {limit} exceeded at t = {t} for k = {k}, eta = {eta}")]
    StepLimit { limit: u64, t: f64, k: i32, eta: f64 },

    #[error("invalid time horizon: {0}")]
    InvalidHorizon(String),

    #[error("CFL violation: {0}")]
    Cfl(String),

    #[error("boundary contamination: |value| = {value:e} at the domain edge exceeds {limit:e}")]
    BoundaryContamination { value: f64, limit: f64 },

    #[error("singular linear system: {0}")]
    Singular(String),

    #[error("power-law fit: {0}")]
    Fit(String),

    #[error("misconfigured bound check: {0}")]
    Bound(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
