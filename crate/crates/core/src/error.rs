use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("gamma function pole at x = {0}")]
    Pole(f64),

    #[error("argument {0} overflows the gamma function range")]
    Overflow(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("{what} did not converge after {evaluations} evaluations (best estimate {estimate:e} ± {abs_error:e})")]
    NonConvergence { what: String, evaluations: usize, estimate: f64, abs_error: f64 },

    #[error("pole at {pole} is not strictly inside ({lower}, {upper})")]
    PoleOnBoundary { pole: f64, lower: f64, upper: f64 },

    #[error("no sign change on [{a}, {b}]: f(a) = {fa:e}, f(b) = {fb:e}")]
    NoSignChange { a: f64, b: f64, fa: f64, fb: f64 },

    #[error("unstable resonator: {0}")]
    Instability(String),

    #[error("numerical derivative unstable: Richardson levels {coarse:e} and {fine:e} disagree")]
    DerivativeUnstable { coarse: f64, fine: f64 },

    #[error("outside validity range: {0}")]
    Validity(String),

    #[error("not found: {0}")]
    NotFound(String),

    #[error("coherent drive amplitude is zero at omega = {0}")]
    ZeroDrive(f64),

    #[error("probe is not weak (g/kappa = {0}); radiation-pressure backaction is not modelled")]
    Backaction(f64),

    #[error("transduction vanishes on the whole grid ({0} points)")]
    SingularTransduction(usize),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Names the integral (or iteration) that failed to converge.
    pub fn context(self, what: impl Into<String>) -> Self {
        match self {
            Error::NonConvergence { evaluations, estimate, abs_error, .. } => {
                Error::NonConvergence { what: what.into(), evaluations, estimate, abs_error }
            }
            other => other,
        }
    }

    pub fn is_non_convergence(&self) -> bool {
        matches!(self, Error::NonConvergence { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
