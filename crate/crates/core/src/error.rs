use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("spanning set is numerically zero (all singular values below tolerance)")]
    ZeroSubspace,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("subspace is not contained in the enclosing subspace (deviation {deviation:.3e})")]
    NotContained { deviation: f64 },

    #[error("family does not span the space: rank {rank} < dimension {dim}")]
    NotAFrame { rank: usize, dim: usize },

    #[error("length mismatch: {0}")]
    LengthMismatch(String),

    #[error("subspaces do not span the space: rank {rank} < dimension {dim}")]
    NotAFusionFrame { rank: usize, dim: usize },

    #[error("weight {index} is not a positive finite number ({value})")]
    InvalidWeight { index: usize, value: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("duality identity fails: residual {residual:.3e} > tol {tol:.1e}")]
    NotDual { residual: f64, tol: f64 },

    #[error("matrix is not a left inverse of the analysis operator: residual {residual:.3e} > tol {tol:.1e}")]
    NotLeftInverse { residual: f64, tol: f64 },

    #[error("fusion frame is not overcomplete (it is a Riesz fusion basis or not a fusion frame)")]
    NotOvercomplete,

    #[error("subspace {index} is trivial")]
    TrivialSubspace { index: usize },

    #[error("fusion frame is not a Riesz fusion basis")]
    NotRiesz,

    #[error("operator is not block-diagonal")]
    NotBlockDiagonal,

    #[error("alternate-dual reconstruction identity fails: residual {residual:.3e} > tol {tol:.1e}")]
    NotAlternateDual { residual: f64, tol: f64 },

    #[error("invalid fusion frame system: {0}")]
    InvalidSystem(String),

    #[error("local frame {index} is not dual to the given local frame: residual {residual:.3e}")]
    NotLocalDual { index: usize, residual: f64 },

    #[error("operator {index} is not projective: deviation {deviation:.3e}")]
    NotProjective { index: usize, deviation: f64 },

    #[error("invalid erasure count r = {r} (must lie in 1..={max})")]
    BadR { r: usize, max: usize },

    #[error("{count} erasure patterns exceed the enumeration limit {limit}; lower r or m")]
    TooManyPatterns { count: u128, limit: u128 },

    #[error("local frame vector ({block}, {index}) has norm {norm}, expected 1")]
    NotUnitNorm { block: usize, index: usize, norm: f64 },

    #[error("local frame vector ({block}, {index}) is null")]
    NullVector { block: usize, index: usize },

    #[error("solver did not converge in {iterations} iterations (relative improvement {improvement:.3e})")]
    NonConvergence { iterations: usize, improvement: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid input: {0}")]
    InvalidSpec(String),
}
