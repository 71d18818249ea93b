use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised anywhere in the library.
///
/// The CLI maps [`Error::is_usage`] variants to exit code 2 and everything
/// else to exit code 1.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("filter diverged at t = {t} (log sigma^2 = {value})")]
    FilterDivergence { t: usize, value: f64 },

    #[error("simulation left the stationary region at t = {t} (|log sigma^2| > {guard})")]
    Nonstationary { t: usize, guard: f64 },

    #[error("singular matrix: smallest pivot {pivot:e} ({context})")]
    Singular { pivot: f64, context: String },

    #[error("no convergence after {iterations} iterations: {message}")]
    NonConvergence {
        iterations: usize,
        message: String,
        best_point: Vec<f64>,
        best_value: f64,
    },

    #[error("finite-difference probe failed on coordinate {coordinate}")]
    ProbeFailure { coordinate: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("indeterminate: {0}")]
    Indeterminate(String),

    #[error("degenerate loss differential: {0}")]
    DegenerateDifferential(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error("unknown currency {requested:?}; available: {available}")]
    UnknownCurrency { requested: String, available: String },

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },

    #[error("network error: {0}")]
    Network(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// Errors caused by bad input or the environment rather than by the
    /// statistics.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::Malformed(_)
                | Error::UnknownCurrency { .. }
                | Error::Io { .. }
                | Error::Network(_)
        )
    }

    /// Short machine-readable tag used in JSON error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid_argument",
            Error::InvalidModel(_) => "invalid_model",
            Error::FilterDivergence { .. } => "filter_divergence",
            Error::Nonstationary { .. } => "nonstationary",
            Error::Singular { .. } => "singular",
            Error::NonConvergence { .. } => "non_convergence",
            Error::ProbeFailure { .. } => "probe_failure",
            Error::Numeric(_) => "numeric",
            Error::Indeterminate(_) => "indeterminate",
            Error::DegenerateDifferential(_) => "degenerate_differential",
            Error::Malformed(_) => "malformed",
            Error::UnknownCurrency { .. } => "unknown_currency",
            Error::Io { .. } => "io",
            Error::Network(_) => "network",
        }
    }
}
