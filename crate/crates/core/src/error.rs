use thiserror::Error;

/// Errors produced by curve construction, the linear solvers and the time-stepping schemes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("invalid curve: {0}")]
    InvalidCurve(String),

    #[error("degenerate mesh: element {element} has length {length:e}")]
    DegenerateMesh { element: usize, length: f64 },

    #[error("singular linear system: pivot {pivot:e} at row {row}")]
    Singular { row: usize, pivot: f64 },

    /// A step's linear system could not be solved; the discrete vertex normals
    /// are degenerate or the state left the admissible set.
    #[error("well-posedness violated in the {system} system at step {step}: {detail}")]
    WellPosedness {
        system: &'static str,
        step: usize,
        detail: String,
    },

    #[error("Picard iteration did not converge in {iterations} sweeps (last update {update:e})")]
    PicardDivergence { iterations: usize, update: f64 },

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    /// Short machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidShape(_) => "invalid_shape",
            Error::InvalidCurve(_) => "invalid_curve",
            Error::DegenerateMesh { .. } => "degenerate_mesh",
            Error::Singular { .. } => "singular",
            Error::WellPosedness { .. } => "well_posedness",
            Error::PicardDivergence { .. } => "picard_divergence",
            Error::Config { .. } => "config",
            Error::Domain(_) => "domain",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
            Error::Csv(_) => "csv",
        }
    }

    /// `3` for failures of the numerics, `2` for bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DegenerateMesh { .. }
            | Error::Singular { .. }
            | Error::WellPosedness { .. }
            | Error::PicardDivergence { .. } => 3,
            _ => 2,
        }
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
