//! Exact complex state-vector algebra for small systems of two-level
//! subsystems: tensor products, basis changes, projective measurement,
//! conditional states, Schmidt analysis and spin correlations.
//!
//! States are dense (`2^n` amplitudes, `n ≤ 12`) and immutable; every
//! operation returns a new value. States are compared through fidelity since
//! conditioning fixes no global phase.

mod basis;
mod schmidt;
mod spin;
mod state;

pub use basis::{
    bell_state, conditional_state, decompose, measure, outcome_distribution, pick_outcome, BellKind, Distribution,
    Measurement, MeasurementBasis, IMPOSSIBLE,
};
pub use schmidt::{is_product, schmidt_coefficients, SVD_TOL};
pub use spin::{spin_correlation, MeasurementAxis};
pub use state::{ComplexAmplitude, Spin, StateVector, SubsystemId, EXACT_TOL, MAX_SUBSYSTEMS};

/// Fidelity threshold for treating two states as equal up to phase.
pub const FIDELITY_TOL: f64 = 1e-9;
