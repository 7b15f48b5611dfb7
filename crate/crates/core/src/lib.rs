//! Simulator for the transactional interpretation of quantum mechanics.
//!
//! - [`qcore`]: dense state vectors over two-level subsystems, bases,
//!   projective measurement, Schmidt coefficients, spin correlations.
//! - [`transaction`]: offer/confirmation waves over explicit absorber
//!   configurations, Born-rule transaction formation, wave graphs.
//! - [`scenarios`]: Renninger, Maudlin, quantum liar and entanglement
//!   swapping as runnable experiments.
//! - [`stats`]: frequency tables, σ-gated comparisons, CHSH, reports.

pub mod error;
pub mod qcore;
pub mod rng;
pub mod scenarios;
pub mod stats;
pub mod transaction;

pub use error::{Error, Result};
pub use qcore::{
    BellKind, ComplexAmplitude, Distribution, MeasurementAxis, MeasurementBasis, Spin, StateVector, SubsystemId,
};
pub use rng::TrialRng;
pub use scenarios::{Experiment, ScenarioConfig, ScenarioKind, ScenarioResult};
pub use transaction::{AbsorberConfiguration, Transaction, WaveGraph};
