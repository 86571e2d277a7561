use thiserror::Error;

/// Failures raised by the physical model, the controllers, and the run loop.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("wave velocity requested above mean sea level (z = {z})")]
    AboveSurface { z: f64 },

    #[error("draft {draft} m outside [0, {height}] m")]
    DraftOutOfRange { draft: f64, height: f64 },

    #[error("generalized mass matrix is singular or indefinite; state: {state}")]
    SingularMassMatrix { state: String },

    #[error("cable tension undefined for near-vertical cable (alpha = {alpha} rad)")]
    TensionUndefined { alpha: f64 },

    #[error("reference height unreachable with a taut cable: |dz| = {dz} m > l = {length} m")]
    ReferenceInfeasible { dz: f64, length: f64 },

    #[error("non-finite state at t = {t} s: {state}")]
    NonFinite { t: f64, state: String },
}

/// Scenario loading and validation failures.
#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read scenario {path}: {source}")]
    Read {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot parse scenario: {0}")]
    Parse(#[from] toml::de::Error),

    #[error("invalid scenario: {0}")]
    Invalid(String),
}

/// Top-level error of a simulation run.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),

    #[error(transparent)]
    Model(#[from] ModelError),

    #[error("output error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration problems, 3 for
    /// fatal dynamics errors, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Model(ModelError::InvalidParameter { .. }) => 2,
            Error::Model(_) => 3,
            Error::Io(_) | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = ModelError> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> ModelError {
    ModelError::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
