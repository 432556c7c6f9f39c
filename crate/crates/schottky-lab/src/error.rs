//! Error types shared by all modules.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("scalar variant mismatch: {0}")]
    VariantMismatch(&'static str),

    #[error("trace is within {tol:e} of 2 but not exactly representable; supply exact integer entries")]
    AmbiguousClassification { tol: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("surface construction failed: {0}")]
    Construction(String),

    #[error("surface validation failed: {0}")]
    Validation(String),

    #[error("length spectrum incomplete: provable cutoff {achieved_cutoff} below requested {requested}")]
    IncompleteSpectrum {
        achieved_cutoff: f64,
        requested: f64,
    },

    #[error("requested tolerance {requested:e} not reached, achieved {achieved:e}")]
    PrecisionNotReached { requested: f64, achieved: f64 },

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("unresolved zero cluster in box re [{re_min}, {re_max}], im [{im_min}, {im_max}]")]
    UnresolvedCluster {
        re_min: f64,
        re_max: f64,
        im_min: f64,
        im_max: f64,
    },

    #[error("no sign change located while estimating the leading zero: {0}")]
    Estimation(String),

    #[error("Fourier decay verdict failed: {0}")]
    DecayViolation(String),

    #[error("parameter constraint violated: {0}")]
    Parameter(String),

    #[error("counting query exceeds the validity box: {0}")]
    Coverage(String),

    #[error("resonance box too small for requested budget: need |Im| up to {required_t_max:.3}, have {t_max:.3}")]
    InsufficientBox { required_t_max: f64, t_max: f64 },

    #[error("trace congruence violated for {violations} words at modulus {modulus}")]
    CongruenceViolation { modulus: u64, violations: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Other(String),
}
