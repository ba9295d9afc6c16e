//! Error type shared by all pipeline stages.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not anti-Hermitian (Hermitian defect {defect:.3e})")]
    NotAntiHermitian { defect: f64 },

    #[error("matrix is not unitary (defect {defect:.3e})")]
    NotUnitary { defect: f64 },

    #[error("columns are numerically rank deficient (smallest singular value {sigma_min:.3e})")]
    RankDeficient { sigma_min: f64 },

    #[error("columns are not orthonormal (defect {defect:.3e})")]
    NotOrthonormal { defect: f64 },

    #[error("not a rank-{expected} orthogonal projector at index {index}: {detail}")]
    NotProjector {
        index: usize,
        expected: usize,
        detail: String,
    },

    /// Consecutive samples of a discrete curve fail the smoothness rule
    /// (smallest overlap singular value must exceed 0.5).
    #[error(
        "curve too coarse at sample {index}: consecutive subspaces are {classification} \
         (smallest overlap singular value {sigma_min:.3e}); supply more samples"
    )]
    CurveTooCoarse {
        index: usize,
        classification: String,
        sigma_min: f64,
    },

    #[error(
        "curve not smooth near s = {s:.6}: connection anti-Hermiticity defect {defect:.3e} \
         exceeds {limit:.0e}"
    )]
    CurveNotSmooth { s: f64, defect: f64, limit: f64 },

    #[error("discrete curve stores {stored} samples; cannot resample at {requested} steps")]
    ResampleTooFine { stored: usize, requested: usize },

    #[error("endpoint subspaces are orthogonal: holonomy undefined")]
    OrthogonalEndpoints,

    #[error("endpoint subspaces overlap only partially (rank {rank} of {dim}); {hint}")]
    PartialOverlap {
        rank: usize,
        dim: usize,
        hint: &'static str,
    },

    #[error("decomposition failed to converge: {0}")]
    DecompositionFailed(&'static str),

    #[error("integrator unitarity defect {defect:.3e} exceeds {limit:.0e}; increase n_time_steps")]
    UnitarityLost { defect: f64, limit: f64 },

    #[error("evolution runs mismatched: {0}")]
    MismatchedRuns(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
