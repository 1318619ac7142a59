use thiserror::Error;

use crate::complex::Simplex;

#[derive(Debug, Error)]
pub enum HdxError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: isize, found: isize },

    #[error("weight of face {face} must be positive and finite, got {weight}")]
    NonPositiveWeight { face: Simplex, weight: f64 },

    #[error("duplicate face {0}")]
    DuplicateFace(Simplex),

    #[error("vertex {0} repeated in a simplex")]
    RepeatedVertex(usize),

    #[error("face {0} is not in the complex")]
    MissingFace(Simplex),

    #[error("complex is not pure: face {0} lies in no top-dimensional face")]
    NotPure(Simplex),

    #[error("{what}: dimension {k} outside [{min}, {max}]")]
    OutOfRange {
        what: &'static str,
        k: isize,
        min: isize,
        max: isize,
    },

    #[error("complex has no top faces")]
    EmptyComplex,

    #[error("cochain has length {found} but X({k}) has {expected} faces")]
    CochainLength { k: isize, expected: usize, found: usize },

    #[error("cochain value at index {0} is not finite")]
    NonFiniteValue(usize),

    #[error("ratio undefined for the zero cochain")]
    ZeroCochain,

    #[error("cochain is not orthogonal to constants (relative residual {0:e})")]
    NotInC0(f64),

    #[error("link of {0} has an empty 1-skeleton")]
    EmptyLink(Simplex),

    #[error("face set is empty")]
    EmptyFaceSet,

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("generation failed after {attempts} attempts: {reason}")]
    GenerationFailure { attempts: usize, reason: String },

    #[error("integer overflow while computing exact homogeneous weights")]
    Overflow,

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, HdxError>;
