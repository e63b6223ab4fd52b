use num_complex::Complex64;
use thiserror::Error;

/// Errors shared by every module of the crate.
///
/// Validation of parameters never goes through this type (it produces a
/// [`crate::params::ValidationReport`] instead); everything downstream of a
/// validated parameter set reports failures here.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("parameter vectors must have the same positive length: len(b) = {b_len}, len(c) = {c_len}")]
    DimensionMismatch { b_len: usize, c_len: usize },

    #[error("{m} variables exceed the supported maximum of {max}")]
    TooManyVariables { m: usize, max: usize },

    #[error("index {index} out of range for {m} variables")]
    IndexOutOfRange { index: usize, m: usize },

    #[error("multi-index entries must be strictly increasing integers >= 1")]
    MalformedMultiIndex,

    #[error("point outside the convergence domain: sum of |x_k| = {sum_abs} must be < 1")]
    OutsideConvergenceDomain { sum_abs: f64 },

    #[error("gamma pole at z = {z}")]
    GammaPole { z: Complex64 },

    #[error("series coefficient pole: c_{k} + {n} vanishes")]
    CoefficientPole { k: usize, n: u32 },

    #[error("branch point: x_{k} = {x} must be a positive real for local solutions")]
    BranchPoint { k: usize, x: Complex64 },

    #[error("resonant parameters: {condition} vanishes on subset {{{subset}}}")]
    Resonance { condition: String, subset: String },

    #[error("quadrature did not converge: error estimate {err_est:e} > target {target:e} after level {level}")]
    QuadratureNonConvergence {
        err_est: f64,
        target: f64,
        level: usize,
    },

    #[error("quadrature dimension {dim} unsupported (1 through 3)")]
    UnsupportedDimension { dim: usize },

    #[error("parameters fail the non-integrality conditions: {0}")]
    InvalidParameters(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
