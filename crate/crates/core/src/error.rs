use thiserror::Error;

/// Failures reported by the estimation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// `λᵢ + λⱼ` of the zeroth moment fell below the solvability threshold.
    #[error("zeroth moment is degenerate: smallest eigenvalue pair sum {min_pair_sum:e}")]
    DegenerateGamma0 { min_pair_sum: f64 },

    #[error("Fock truncation too small: tail mass {tail:e} exceeds 0.01")]
    TruncationTooSmall { tail: f64 },

    #[error("invalid rate: {0}")]
    InvalidRate(String),

    #[error("invalid prior: {0}")]
    InvalidPrior(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("matrix is not a density matrix: {0}")]
    InvalidState(String),

    /// `sin(2 g0 τc)` vanishes, so the `f_z` density carries no constraint.
    #[error("sin(2 g0 tau_c) vanishes; f_z carries no constraint")]
    SinVanishes,

    #[error("symmetric logarithmic derivative is singular at g = {g}")]
    SingularSld { g: f64 },

    #[error("unsupported combination: {0}")]
    UnsupportedCombination(String),
}

pub type Result<T> = std::result::Result<T, Error>;
