//! Segmented pulse synthesis for simultaneously entangling XX gates on
//! trapped-ion chains.
//!
//! A laser drive at fixed detuning, amplitude-modulated over equal time
//! segments, entangles ion pairs through the chain's transverse motional
//! modes. Valid pulse sets satisfy two kinds of conditions: every ion's
//! phase-space trajectory must close on all modes (a linear constraint per
//! mode quadrature), and every pair's accumulated coupling must land on its
//! target angle, zero for pairs that must stay decoupled (one quadratic
//! constraint per pair).
//!
//! The closure constraints are the same for every ion, so all pulses live in
//! one shared null space. Inside it, a single pair is solved exactly by an
//! extreme eigenvector of the projected coupling form, and arbitrary sets of
//! pairs, overlapping or not, are solved one qubit at a time with linear
//! algebra only: see [`single_xx::solve_single_xx`] and [`ease::solve_ease`].
//! [`verify::verify_solution`] re-checks any pulse set by direct quadrature
//! of the defining integrals, sharing no code path with the synthesis
//! formulas. [`counts`] compares two-qubit gate budgets against merged
//! simultaneous gates for a few standard circuit families, and [`modes`]
//! generates chain mode data when no measured values are at hand.
//!
//! The `easegate` binary wires these together; see [`cli`].

pub mod cli;
pub mod counts;
pub mod ease;
pub mod error;
pub mod integrals;
pub mod linalg;
pub mod model;
pub mod modes;
pub mod quad;
pub mod single_xx;
pub mod tolerance;
pub mod verify;

pub use counts::{
    counts_bv, counts_heisenberg, counts_hidden_shift, counts_qft, counts_vqe, CountResult, Ratio,
    VqeVariant,
};
pub use ease::{preprocess_groups, solve_ease, QubitOrdering, StepKind};
pub use error::{Error, Result};
pub use model::{
    load_spec, load_spec_path, load_trap_config, load_trap_config_path, validate_spec,
    CouplingTarget, EntanglementSpec, PulseSolution, TrapConfig, TrapConfigFile,
    VerificationReport,
};
pub use modes::{generate_chain_modes, ChainModes, ChainParams};
pub use single_xx::{solve_single_xx, SingleXxSolution};
pub use tolerance::ToleranceSet;
pub use verify::{alpha_residual, chi_value, verify_solution, QuadratureSettings};
