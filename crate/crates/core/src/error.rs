use thiserror::Error;

/// Errors produced by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid resolution: need at least 3 nodes per axis, got {nx}x{ny}")]
    InvalidResolution { nx: usize, ny: usize },

    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field contains non-finite values")]
    InvalidField,

    #[error("field must have unit mass (got {mass})")]
    NotNormalized { mass: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("ODE integration failed at r = {r}: {reason}")]
    IntegrationFailure { r: f64, reason: String },

    #[error("could not bracket the ground-state initial value in [{lo}, {hi}]")]
    BracketingFailure { lo: f64, hi: f64 },

    #[error(
        "conjugate gradient did not converge in {iterations} iterations (residual {residual:e})"
    )]
    LinearSolve { iterations: usize, residual: f64 },

    #[error("a = {a} is at or above the critical value a* = {a_star}; no minimizer exists")]
    Supercritical { a: f64, a_star: f64 },

    #[error("under-resolved: kinetic energy {kinetic} exceeds the grid bound {bound}")]
    UnderResolved { kinetic: f64, bound: f64 },

    #[error("trial state geometry: {0}")]
    Geometry(String),

    #[error("trial state is under-resolved: {0}")]
    Resolution(String),

    #[error("phase alignment undefined: overlap with the reference vanishes")]
    AlignmentDegenerate,

    #[error("inconsistent sweep: {0}")]
    InconsistentSweep(String),

    #[error("field file: bad magic {0:?}")]
    FormatVersion([u8; 4]),

    #[error("field file truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },

    #[error("field file does not match the grid: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Stable machine-readable identifier used in error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidResolution { .. } => "invalid-resolution",
            Error::InvalidDomain(_) => "invalid-domain",
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::InvalidField => "invalid-field",
            Error::NotNormalized { .. } => "not-normalized",
            Error::Degenerate(_) => "degenerate-input",
            Error::IntegrationFailure { .. } => "integration-failure",
            Error::BracketingFailure { .. } => "bracketing-failure",
            Error::LinearSolve { .. } => "linear-solve",
            Error::Supercritical { .. } => "supercritical-rejected",
            Error::UnderResolved { .. } => "under-resolved",
            Error::Geometry(_) => "geometry",
            Error::Resolution(_) => "resolution",
            Error::AlignmentDegenerate => "alignment-degenerate",
            Error::InconsistentSweep(_) => "inconsistent-sweep",
            Error::FormatVersion(_) => "format-version",
            Error::Truncated { .. } => "truncated",
            Error::GridMismatch(_) => "grid-mismatch",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
