use thiserror::Error;

/// Errors raised by the construction and evaluation routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid bipartite dimensions {d1}x{d2} (need 2 <= d1 <= d2)")]
    InvalidDims { d1: usize, d2: usize },

    #[error("matrix is not Hermitian (max deviation {0:e})")]
    NotHermitian(f64),

    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),

    #[error("operator trace is {0}, expected 1")]
    InvalidTrace(f64),

    #[error("operator is not positive (min eigenvalue {0:e})")]
    NotPositive(f64),

    #[error("non-finite entry")]
    NonFinite,

    #[error("state is separable; no witness can be built from it")]
    Separable,

    #[error("operation requires two qubits, got {d1}x{d2}")]
    NotTwoQubit { d1: usize, d2: usize },

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("outcomes do not sum to identity (deviation {0:e})")]
    Incomplete(f64),

    #[error("outcome {index} is not a witness: its pure state is separable")]
    SeparableOutcome { index: usize },

    #[error("measurement is not a rank-one measurement")]
    NotRankOne,

    #[error("measurement has no bipartite structure")]
    NotBipartite,

    #[error("measurement is not minimal informationally complete: {0}")]
    NotMinimalIc(String),

    #[error("Gram matrix is ill-conditioned (condition number {0:e})")]
    IllConditioned(f64),

    #[error("negative outcome probability {0:e}")]
    NegativeProbability(f64),

    #[error("outcome probabilities sum to {0}")]
    ProbabilitySum(f64),

    #[error("no counts recorded")]
    NoCounts,

    #[error("fiducial search failed after {restarts} restarts (best frame potential excess {best_excess:e})")]
    SearchFailed { restarts: usize, best_excess: f64 },

    #[error(
        "no fiducial with uniform concurrence sqrt(2/5) among {found} SIC fiducials found in {restarts} restarts"
    )]
    NoUniformConcurrence { restarts: usize, found: usize },

    #[error("fiducial orbit is not symmetric (max overlap deviation {0:e})")]
    NotSic(f64),

    #[error("cache file: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;
