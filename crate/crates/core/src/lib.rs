//! Geometric global quantum discord (GGQD) of two-qubit states.
//!
//! The crate is organised bottom-up:
//!
//! * [`qstate`] validates, generates and transforms 4×4 density matrices.
//! * [`pauli`] maps a density matrix onto its Bloch vectors and correlation
//!   tensor `(x, y, T)`.
//! * [`objective`] evaluates the local-measurement functional
//!   `f(a, b) = 1 + (y·b)² + (x·a)² + (a·T b)²` and maximises it exactly over
//!   the measurement direction `a`.
//! * [`solver`] maximises over `b`, runs the brute-force angle oracle and the
//!   X-state candidate fast path, and assembles the discord
//!   `D = Tr(C Cᵀ) − f_max / 4`.
//!
//! Grid evaluations and batch work go through [`par`], which uses rayon when
//! the `parallel` feature is enabled (the default) and plain iterators
//! otherwise. Results are bit-identical in both modes.

pub mod objective;
pub mod par;
pub mod pauli;
pub mod qstate;
mod simplex;
pub mod solver;

pub use objective::{
    objective_coefficients, objective_f, rank2_lambda_max, reduced_over_a, AReduction, Direction,
    MeasurementDirections, ObjectiveCoefficients, ObjectiveError, Rank2Max,
};
pub use pauli::{pauli_decompose, reconstruct_density, trace_cc, CorrelationData};
pub use qstate::{
    generate_state, local_unitary_conjugate, swap_subsystems, validate_density, DensityMatrix,
    StateError, StateFamily, StateFamilySpec,
};
pub use solver::{
    brute_force_oracle, ggqd, ggqd_batch, ggqd_from_correlations, maximize_objective,
    xstate_candidates, GgqdError, GgqdResult, Maximum, Method, SolverConfig, SolverMethod,
};
