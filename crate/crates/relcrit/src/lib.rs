//! Exact-arithmetic combinatorics of restricted root systems and the
//! cone-positivity criterion deciding square integrability of representations
//! on p-adic symmetric spaces.
//!
//! Everything is computed over arbitrary-precision integers and rationals;
//! verdicts are sign decisions and must never depend on rounding.

pub mod cli;
pub mod cone;
pub mod criterion;
pub mod involution;
pub mod jacquet;
pub mod lattice;
pub mod presets;
pub mod report;
pub mod root_datum;

/// Errors surfaced by the library. Input-shaped problems (bad data, bad
/// options) are kept distinct from verdicts: a failing criterion is a normal
/// return value, never an `Err`.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("matrix is not an involution")]
    NotInvolution,
    #[error("matrix does not permute the root system: image of root {0} is not a root")]
    NotRootPermutation(usize),
    #[error("coroot data incompatible with the involution at root {0}")]
    CorootMismatch(usize),
    #[error("simple system is not adapted to the involution: positive root {root:?} has positive non-fixed image")]
    SigmaBasisViolation { root: Vec<i64> },
    #[error("root datum failed validation: {0:?}")]
    InvalidDatum(Vec<String>),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattice mismatch: {0}")]
    LatticeMismatch(String),
    #[error("point lies outside the required region: {0}")]
    OutsideRegion(String),
    #[error("inner lattice is not contained in the outer lattice")]
    NotContained,
    #[error("subset is not sigma-split: {0:?}")]
    NotSigmaSplit(Vec<usize>),
    #[error("Weyl group size exceeds the configured limit {0}")]
    WeylSizeLimit(usize),
    #[error("exponent family is not restriction-closed: {0}")]
    ClosureRequired(String),
    #[error("derived structure violated an internal invariant: {0}")]
    InvariantViolation(String),
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid job: {0}")]
    InvalidJob(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
