//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the evaluation, series, and zero-location layers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("precision must be at least 64 bits, got {0}")]
    PrecisionTooLow(u32),

    #[error("invalid context parameter: {0}")]
    InvalidContext(String),

    #[error("q must lie strictly inside (0, 1), got {0}")]
    QOutOfRange(String),

    #[error("non-finite value produced in {0}")]
    NonFinite(&'static str),

    #[error("q-gamma pole at z = {0}")]
    QGammaPole(String),

    #[error("series truncation failed after {terms} terms; tail bound reached {bound}")]
    TruncationFailure { terms: usize, bound: String },

    #[error("series diverges: {r} numerator parameters but only {s} denominator parameters (need r <= s+1)")]
    Divergent { r: usize, s: usize },

    #[error("denominator q-Pochhammer symbol vanishes at series index {k}")]
    DenominatorZero { k: usize },

    #[error("no numerator exponent equal to a nonpositive integer -n; series does not terminate")]
    NotTerminating,

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("root solver failed to converge after {sweeps} sweeps (max correction {max_correction})")]
    SolverNoConvergence {
        sweeps: usize,
        max_correction: String,
        best: Vec<(String, String)>,
    },

    #[error("Newton refinement diverged from {start}")]
    NewtonDiverged { start: String },

    #[error("Newton refinement hit the iteration cap at {last}")]
    NewtonStalled { last: String },

    #[error("zero on or near contour boundary; unresolved after {dilations} dilations")]
    BoundaryZero { dilations: usize },

    #[error("winding number did not settle to an integer ({value})")]
    WindingNotInteger { value: String },

    #[error("zero count in search region unstable under dilation ({inner} inside vs {outer} dilated); enlarge the box")]
    BoxUnstable { inner: u32, outer: u32 },

    #[error("could not isolate zeros: {0}")]
    IsolationFailure(String),

    #[error("matching failure: {0}")]
    MatchingFailure(String),

    #[error("unknown experiment id {0} (valid: 1..=5)")]
    UnknownExperiment(u32),

    #[error("invalid family: {0}")]
    InvalidFamily(String),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
