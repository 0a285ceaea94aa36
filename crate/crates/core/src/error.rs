use thiserror::Error;

/// Errors raised across the pipeline, the oracles and the histories engine.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A parameter set violates one of the model invariants.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    /// The spin-up population vanished so the field inversion saturates.
    #[error("reading saturated: alpha = 0, arctan argument diverges")]
    Saturated,

    /// A numerical procedure failed to reach its tolerance.
    #[error("numeric error: {what} (residual estimate {residual:e})")]
    Numeric { what: String, residual: f64 },

    /// Finite-difference step too small relative to the field value.
    #[error("finite-difference step {h:e} underflows for field {field:e}")]
    StepUnderflow { h: f64, field: f64 },

    /// The grid wavefunction reached the hard walls of the domain.
    #[error("boundary contamination: |psi| = {amplitude:e} at the {edge} edge")]
    BoundaryContamination { edge: &'static str, amplitude: f64 },

    /// A grid measurement was requested before the packet left the region.
    #[error("packet not separated: density {density:e} at x = {boundary}")]
    NotReady { boundary: f64, density: f64 },

    /// Operators of incompatible dimension were combined.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Dense operator dimension above the supported cap.
    #[error("dimension {dim} exceeds the cap of {cap}")]
    DimensionCap { dim: usize, cap: usize },

    /// A history operator failed its projector or unitarity check.
    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    /// Weights were requested from a family that is not consistent.
    #[error(
        "family is inconsistent (max violation {max_violation:e}); weights are not probabilities"
    )]
    Inconsistent { max_violation: f64 },

    /// Too few usable points for a regression.
    #[error("insufficient data: {got} usable points, need at least {need}")]
    InsufficientData { got: usize, need: usize },

    /// Regression with no spread in the abscissa.
    #[error("degenerate fit: all abscissae are equal")]
    DegenerateFit,

    /// Configuration file or override problems.
    #[error("config error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        name,
        reason: reason.into(),
    }
}
