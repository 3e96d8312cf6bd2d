use thiserror::Error;

use crate::clifford::Signature;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("signature (0,0) has no Clifford generators")]
    EmptySignature,

    #[error("variant {variant} is not available for signature {signature}")]
    UnsupportedVariant { signature: Signature, variant: String },

    #[error("module construction for {signature} violated {axiom}: {detail}")]
    Construction {
        signature: Signature,
        axiom: String,
        detail: String,
    },

    #[error("module spec is empty or inconsistent: {0}")]
    InvalidSpec(String),

    #[error("module does not satisfy the admissibility axioms: {0}")]
    UnverifiedModule(String),

    #[error("operation requires s > 0, got {0}")]
    RequiresIndefinite(Signature),

    #[error("operation requires s = 0, got {0}")]
    RequiresDefinite(Signature),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("central vector must be nonzero")]
    ZeroCentralVector,

    #[error("dual vector has |mu| != |nu| (|mu|^2 = {mu_sq}, |nu|^2 = {nu_sq})")]
    NotIsotropic { mu_sq: u64, nu_sq: u64 },

    #[error("time parameter must be positive, got {0}")]
    NonPositiveTime(f64),

    #[error("invalid control parameter: {0}")]
    InvalidControls(String),

    #[error("truncation cap reached at radius {radius}: tail bound {bound:e} exceeds tolerance {tolerance:e}")]
    TruncationCap {
        radius: u32,
        bound: f64,
        tolerance: f64,
    },

    #[error("quadrature did not reach tolerance {tolerance:e} (estimate {estimate:e})")]
    Quadrature { tolerance: f64, estimate: f64 },

    #[error("signature {0} is outside the supported congruence classes")]
    UnsupportedSignature(Signature),

    #[error("mixed eigenvalue query on a module with odd half dimension {0}")]
    OddHalfDimension(usize),

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
