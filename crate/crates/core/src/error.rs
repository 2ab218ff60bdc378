use thiserror::Error;

/// Errors raised by the geometric and analytic routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error in {op}: {detail}")]
    Domain { op: &'static str, detail: String },

    /// The first partials of a patch are (numerically) linearly dependent.
    #[error("degenerate immersion: EG - F^2 = {det:e}")]
    DegenerateImmersion { det: f64 },

    /// The adaptive integrator could not keep the monitored invariant in tolerance.
    #[error("step-size failure at t = {t}: {detail}")]
    StepSize { t: f64, detail: String },

    /// Adaptive quadrature exhausted its subdivision budget.
    #[error("quadrature did not converge: estimate {estimate:e}, error {error:e}")]
    Quadrature { estimate: f64, error: f64 },

    /// Boundary or source data carry a nonzero zero-frequency component.
    #[error("zero-mode rejection: {detail}")]
    ZeroMode { detail: String },

    /// Malformed input data (job files, CSV columns, grid sizes).
    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` is not `Clone`; keep its rendering only.
#[derive(Debug, Error, Clone, PartialEq)]
#[error("{0}")]
pub struct IoError(pub String);

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError(e.to_string()))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Input(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(op: &'static str, detail: impl Into<String>) -> Result<T> {
    Err(Error::Domain {
        op,
        detail: detail.into(),
    })
}
