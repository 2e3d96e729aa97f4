//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("solver did not converge after {iterations} iterations (relative residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("invalid solver configuration: {0}")]
    InvalidSolverConfig(String),

    #[error("sample height {height_m:.3e} m is below the local grid spacing {local_dy_m:.3e} m")]
    HeightUnresolvable { height_m: f64, local_dy_m: f64 },

    #[error("region {region} has {samples} samples (at least {required} required)")]
    EmptyRegion {
        region: &'static str,
        samples: usize,
        required: usize,
    },

    #[error("invalid capacitance: C = {c:.6e} F/m is below the vacuum value C0 = {c0:.6e} F/m")]
    InvalidCapacitance { c: f64, c0: f64 },

    #[error("parse error at {path}:{line}: {msg}")]
    ParseError {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("too few samples: {found} found, {required} required")]
    TooFewSamples { found: usize, required: usize },

    #[error("domain too short: {0}")]
    DomainTooShort(String),

    #[error("grid too coarse: ground-state energy changes by {rel_change:.3e} under refinement (limit {limit:.1e})")]
    GridTooCoarse { rel_change: f64, limit: f64 },

    #[error("no bound state below the escape threshold")]
    NoBoundState,

    #[error("not enough bound states: {0} found, 2 required")]
    NotEnoughBoundStates(usize),

    #[error("fit diverged: {0}")]
    FitDiverged(String),

    #[error("insufficient span: {0}")]
    InsufficientSpan(String),

    #[error("no avoided crossing inside the control range")]
    NoCrossingInRange,

    #[error("sweep point t = {t_m:.3e} m, mode {mode}: {source}")]
    SweepPoint {
        t_m: f64,
        mode: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error("config error: key `{key}`: {msg}")]
    ConfigKey { key: String, msg: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// True for errors caused by bad user input or configuration,
    /// as opposed to numerical failures at run time.
    pub fn is_config_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidGeometry(_)
                | Error::ResolutionTooCoarse(_)
                | Error::InvalidSolverConfig(_)
                | Error::ParseError { .. }
                | Error::TooFewSamples { .. }
                | Error::DomainTooShort(_)
                | Error::ConfigKey { .. }
                | Error::InvalidInput(_)
                | Error::Io { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
