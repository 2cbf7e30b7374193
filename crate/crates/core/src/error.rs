use thiserror::Error;

/// Crate-wide error type. Numeric payloads are reported as `f64` regardless of
/// the scalar the computation ran at.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name}={value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("quadrature did not converge: value={value}, error estimate={estimate}")]
    QuadratureNonConvergence { value: f64, estimate: f64 },

    #[error("mixture weights sum to {total}, expected 1 within {tolerance}")]
    WeightSum { total: f64, tolerance: f64 },

    #[error("quantile at u={u} is unbounded for a measure with unbounded support")]
    UnboundedQuantile { u: f64 },

    #[error("evaluation point {t} is a breakpoint; one-sided values differ")]
    BreakpointDerivative { t: f64 },

    #[error("cdf-pair composition depth {depth} exceeds the cap of {cap}")]
    DepthExceeded { depth: u32, cap: u32 },

    #[error("cdf pairs carry mismatched transform orders {lhs} and {rhs}")]
    AlphaMismatch { lhs: f64, rhs: f64 },

    #[error("point-mass convolution for the Kendall-type family is not constructible; only kernel, weights, and derived laws are available")]
    KendallTypeUnsupported,

    #[error("family has no lack-of-memory law (kernel is not monotone to zero)")]
    NoLomLaw,

    #[error("family kernel does not decrease to zero; no max-representation mixing law")]
    KernelNotVanishing,

    #[error("family has no finite convex decomposition")]
    NoConvexDecomposition,

    #[error("parameters (c={c}, alpha={alpha}, p={p}) are not an admissible Kendall-type triple")]
    NotAdmissible { c: f64, alpha: f64, p: f64 },

    #[error("sample batch is empty")]
    EmptyBatch,

    #[error("operation requires a strictly positive input, got {value}")]
    NonPositiveInput { value: f64 },

    #[error("series did not converge within {terms} terms")]
    SeriesNonConvergence { terms: usize },

    #[error("malformed measure: {0}")]
    MalformedMeasure(String),
}

pub type Result<T> = core::result::Result<T, Error>;
