use floydkit_core::conedoff::ConedError;
use floydkit_core::flow::FlowError;
use floydkit_core::floyd::FloydError;
use floydkit_core::quasiconvex::QcError;
use floydkit_core::{GraphError, WordError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("cap exceeded: {0}")]
    CapExceeded(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    /// 0 success, 1 i/o, 2 config, 3 cap exceeded, 4 internal assertion,
    /// 5 invalid input for the requested computation.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Config(_) => 2,
            CliError::CapExceeded(_) => 3,
            CliError::Internal(_) => 4,
            CliError::Domain(_) => 5,
        }
    }

    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<WordError> for CliError {
    fn from(e: WordError) -> Self {
        CliError::Domain(e.to_string())
    }
}

impl From<GraphError> for CliError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::BallTooLarge { .. }
            | GraphError::CapExceeded(_)
            | GraphError::LengthBudgetExceeded { .. } => CliError::CapExceeded(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<FloydError> for CliError {
    fn from(e: FloydError) -> Self {
        match e {
            FloydError::Graph(g) => g.into(),
            FloydError::Overflow(_) => CliError::CapExceeded(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<FlowError> for CliError {
    fn from(e: FlowError) -> Self {
        match e {
            FlowError::Graph(g) => g.into(),
            FlowError::Floyd(f) => f.into(),
            FlowError::CapExceeded(_) => CliError::CapExceeded(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<ConedError> for CliError {
    fn from(e: ConedError) -> Self {
        match e {
            ConedError::Graph(g) => g.into(),
            ConedError::Word(w) => w.into(),
            ConedError::DisconnectedResult { .. } | ConedError::InvariantViolated(_) => {
                CliError::Internal(e.to_string())
            }
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<QcError> for CliError {
    fn from(e: QcError) -> Self {
        match e {
            QcError::Word(w) => w.into(),
            QcError::Graph(g) => g.into(),
            QcError::Floyd(f) => f.into(),
            QcError::Flow(f) => f.into(),
            QcError::Coned(c) => c.into(),
            _ => CliError::Domain(e.to_string()),
        }
    }
}
