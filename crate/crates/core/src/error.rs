use thiserror::Error;

/// Failure modes of the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid profile: {0}")]
    InvalidProfile(String),
    #[error("division by zero: field strength ε must be nonzero ({0})")]
    ZeroEps(&'static str),
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("wrong regime: {0}")]
    WrongRegime(String),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("incomplete mode count: no certificate up to k = {k_max}; partial per-k counts {per_k:?}")]
    IncompleteCount { k_max: usize, per_k: Vec<usize> },
    #[error("no kernel direction within tolerance (smallest eigenvalue {smallest:e})")]
    NoKernel { smallest: f64 },
    #[error("no unstable wavenumber in the requested range")]
    NoneUnstable,
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate point: {0}")]
    Degenerate(String),
}

impl Error {
    /// True for errors that signal the input lies outside a method's regime.
    pub fn is_regime(&self) -> bool {
        matches!(
            self,
            Error::WrongRegime(_) | Error::UnsupportedRegime(_) | Error::Precondition(_) | Error::NoKernel { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
