use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum GmmError {
    #[error("invalid interaction graph: {0}")]
    InvalidGraph(String),

    #[error("invalid strategy profile: {0}")]
    InvalidProfile(String),

    #[error("model too large for exact inference: {agents} agents, cap is {cap}")]
    ModelTooLarge { agents: usize, cap: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("validation failed: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("gradient requires parametric form (regret potentials)")]
    NotParametric,

    #[error("fit failed at iteration {iteration}: {reason}")]
    FitFailure {
        iteration: usize,
        reason: String,
        /// Mean log-likelihood of every accepted iterate up to the failure.
        trace: Vec<f64>,
    },

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error("[{stage}] {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<GmmError>,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = GmmError> = std::result::Result<T, E>;

impl GmmError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GmmError::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        GmmError::Precondition(msg.into())
    }
}

/// Attach a stage tag to the error of a fallible pipeline step.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| match e {
            already @ GmmError::Stage { .. } => already,
            other => GmmError::Stage {
                stage,
                source: Box::new(other),
            },
        })
    }
}
