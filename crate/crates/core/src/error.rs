use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// One validation finding, located by its entity path
/// (`zone/<name>`, `interzone/<name>`, `interzone/<name>/<component>`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Diagnostic {
    pub path: String,
    pub message: String,
}

impl Diagnostic {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn join_diagnostics(diags: &[Diagnostic]) -> String {
    diags.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed document: {0}")]
    Parse(String),

    #[error("building validation failed:\n{}", join_diagnostics(.0))]
    Validation(Vec<Diagnostic>),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("{what} did not converge within {iterations} iterations (residual history: {history:?})")]
    Convergence { what: String, iterations: usize, history: Vec<f64> },

    #[error("singular system at node {node}")]
    Singular { node: String },

    #[error("weather file row {row}: {message}")]
    Weather { row: usize, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("at {timestamp}: {source}")]
    AtStep {
        timestamp: String,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// The innermost error, looking through timestep context.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }

    pub fn is_validation(&self) -> bool {
        matches!(
            self.root(),
            Error::Validation(_) | Error::Parse(_) | Error::Config(_) | Error::Weather { .. }
        )
    }

    pub fn is_convergence(&self) -> bool {
        matches!(self.root(), Error::Convergence { .. } | Error::Singular { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
