//! The four experiments as runnable scenarios.
//!
//! Each scenario is built once from its configuration into an
//! [`Experiment`], which precomputes everything deterministic (states,
//! absorber configurations, measurement trees) and then draws individual
//! trials from a per-trial random stream.

mod config;
mod liar;
mod maudlin;
mod renninger;
mod swap;

pub use config::{ConfigFile, ScenarioConfig, ScenarioKind};
pub use liar::{QuantumLiarConfig, QuantumLiarExperiment, LIAR_OUTCOMES};
pub use maudlin::{MaudlinConfig, MaudlinExperiment};
pub use renninger::{RenningerConfig, RenningerExperiment};
pub use swap::{EveBasis, MeasurementOrdering, SwapBranch, SwapConfig, SwapExperiment};

use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::Result;
use crate::qcore::{Distribution, StateVector};
use crate::rng::TrialRng;

/// One trial's outcome record.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioResult {
    pub scenario: ScenarioKind,
    pub config_hash: String,
    pub seed: u64,
    /// Label tabulated against the analytic distribution.
    pub outcome: String,
    /// Per-stage outcomes in the order they were realized.
    pub stages: Vec<(String, String)>,
    pub conditional: Option<StateVector>,
    /// Analytic probability of `outcome`.
    pub probability: f64,
}

impl ScenarioResult {
    pub fn stage(&self, name: &str) -> Option<&str> {
        self.stages.iter().find(|(s, _)| s == name).map(|(_, l)| l.as_str())
    }
}

/// A validated scenario ready to produce trials.
pub trait Experiment: Send + Sync {
    fn kind(&self) -> ScenarioKind;

    /// Stable digest of the configuration; identifies results of one run.
    fn config_hash(&self) -> &str;

    /// Exact Born probabilities over every outcome label `trial` can emit.
    fn analytic_distribution(&self) -> Distribution;

    fn trial(&self, rng: &mut TrialRng) -> ScenarioResult;

    /// Informational parameters carried into reports.
    fn metadata(&self) -> Vec<(String, f64)> {
        Vec::new()
    }
}

/// Runs `trials` trials with seeds derived from `master_seed`. The result
/// order and content do not depend on `parallel`.
pub fn run_trials(experiment: &dyn Experiment, master_seed: u64, trials: u64, parallel: bool) -> Vec<ScenarioResult> {
    let one = |i: u64| experiment.trial(&mut TrialRng::for_trial(master_seed, i));
    if parallel {
        (0..trials).into_par_iter().map(one).collect()
    } else {
        (0..trials).map(one).collect()
    }
}

pub fn run_renninger(cfg: &RenningerConfig, rng: &mut TrialRng) -> Result<ScenarioResult> {
    Ok(RenningerExperiment::new(cfg.clone())?.trial(rng))
}

pub fn run_maudlin(cfg: &MaudlinConfig, rng: &mut TrialRng) -> Result<ScenarioResult> {
    Ok(MaudlinExperiment::new(cfg.clone())?.trial(rng))
}

pub fn run_quantum_liar(cfg: &QuantumLiarConfig, rng: &mut TrialRng) -> Result<ScenarioResult> {
    Ok(QuantumLiarExperiment::new(cfg.clone())?.trial(rng))
}

pub fn run_swap(cfg: &SwapConfig, rng: &mut TrialRng) -> Result<ScenarioResult> {
    Ok(SwapExperiment::new(cfg.clone())?.trial(rng))
}

pub fn analytic_distribution(cfg: &ScenarioConfig) -> Result<Distribution> {
    Ok(cfg.build()?.analytic_distribution())
}

pub(crate) fn config_hash<T: Serialize>(kind: ScenarioKind, cfg: &T) -> String {
    let json = serde_json::to_string(cfg).expect("config serializes");
    let digest = Sha256::digest(format!("{}:{json}", kind.as_str()).as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}
