use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Spec(#[from] crate::graph_spec::SpecError),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Compute(#[from] walksearch::Error),

    #[error("{what}: {source}")]
    Io {
        what: String,
        #[source]
        source: std::io::Error,
    },

    #[error("validation failed: max delta {max_delta:e} (tolerance {tolerance:e}), {unmatched} unmatched eigenvalues")]
    ValidationFailed {
        max_delta: f64,
        tolerance: f64,
        unmatched: usize,
    },
}

impl CliError {
    pub fn io(what: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            what: what.into(),
            source,
        }
    }

    /// 2 for configuration problems, 3 for everything raised while computing.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Spec(_) | CliError::Config(_) => 2,
            _ => 3,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Spec(_) => "graph_spec",
            CliError::Config(_) => "config",
            CliError::Compute(_) => "computation",
            CliError::Io { .. } => "io",
            CliError::ValidationFailed { .. } => "validation",
        }
    }

    /// The single-line JSON written to stderr on failure.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Report<'a> {
            error: &'a str,
            message: String,
            exit_code: i32,
        }
        serde_json::to_string(&Report {
            error: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        })
        .expect("error report serializes")
    }
}
