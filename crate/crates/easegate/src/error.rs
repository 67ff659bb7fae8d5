//! Crate-wide error type.
//!
//! Solver infeasibility (empty null space, unreachable couplings, inconsistent
//! constraint systems) is kept distinct from input problems (schema, validation,
//! domain) so the command layer can map them to different exit codes.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input document is structurally wrong: missing or extra keys, wrong types.
    #[error("schema error: {0}")]
    Schema(String),

    /// Input document parsed but the values are unusable.
    #[error("validation error: {0}")]
    Validation(String),

    /// A mode frequency sits within the resonance guard band of the drive.
    /// Closed-form segment integrals divide by |omega_p - mu| and |omega_p + mu|.
    #[error(
        "resonance guard: mode at {mode_freq} rad/us is within {guard} rad/us of the drive at {detuning} rad/us"
    )]
    Resonance {
        mode_freq: f64,
        detuning: f64,
        guard: f64,
    },

    /// The decoupling matrix has full column rank, so no pulse can close all
    /// phase-space trajectories. More segments are required.
    #[error(
        "empty null space: {n_segments} segments against rank {rank}; increase n_segments above {rank}"
    )]
    EmptyNullSpace { n_segments: usize, rank: usize },

    /// Requested coupling angle of zero; the quadratic solve is undefined.
    #[error("coupling angle must be nonzero")]
    InvalidAngle,

    /// No eigenvalue of the projected coupling has the sign of the requested
    /// angle, so no single shared pulse can realize it.
    #[error("no eigenvalue matches the sign of theta = {theta}; the angle is unreachable with a shared pulse")]
    SignUnreachable { theta: f64 },

    /// A qubit ran out of free directions while satisfying its decoupling
    /// constraints.
    #[error(
        "infeasible at qubit position {position}: {constraints} constraints exhaust the \
         {dim}-dimensional null space; increase n_segments to at least {recommended_segments}"
    )]
    InfeasibleSubspace {
        position: usize,
        constraints: usize,
        dim: usize,
        recommended_segments: usize,
    },

    /// The shared eigenvector has no component inside a constrained subspace,
    /// or the projected coupling between the two subspaces vanishes.
    #[error(
        "unreachable coupling at qubit position {position}: the optimal direction has no \
         overlap with the constrained subspace; increase n_segments to at least {recommended_segments}"
    )]
    ZeroOverlap {
        position: usize,
        recommended_segments: usize,
    },

    /// Row reduction exposed a constraint row that no pulse can satisfy.
    #[error(
        "inconsistent constraints at qubit position {position}: {detail}; increase n_segments \
         to at least {recommended_segments}"
    )]
    InconsistentConstraints {
        position: usize,
        detail: String,
        recommended_segments: usize,
    },

    /// Matrix or vector dimensions disagree with the trap configuration.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: String, got: String },

    /// A pulse set is missing an ion that the coupling spec requires.
    #[error("pulse set does not cover ion {ion}")]
    Coverage { ion: usize },

    /// Numerical backend failed (non-convergence, indefinite system).
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Gate-count request outside an algorithm's domain.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
