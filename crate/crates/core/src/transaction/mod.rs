//! Offer waves, confirmation waves and transaction formation.
//!
//! An emitter's offer wave reaches each absorber with some amplitude `ψᵢ`;
//! the absorber answers with a confirmation wave of strength `ψᵢψᵢ*`, and
//! exactly one transaction forms, with absorber `i` selected with
//! probability `|ψᵢ|²`. Probabilities are only defined when the absorbers
//! account for the whole offer wave, so incomplete configurations are
//! rejected instead of renormalized.

mod graph;

pub use graph::{DetectorSpec, NodeKind, SourceSpec, WaveEdge, WaveGraph, WaveKind, WaveLayout, WaveNode};

use std::collections::HashSet;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{self, pick_outcome, MeasurementBasis, StateVector};
use crate::rng::TrialRng;

pub const DEFAULT_COMPLETENESS_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AbsorberRole {
    Detector,
    Source,
    Atom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Absorber {
    id: String,
    role: AbsorberRole,
    offer_amplitude: Complex64,
}

impl Absorber {
    pub fn new(id: impl Into<String>, role: AbsorberRole, offer_amplitude: Complex64) -> Result<Self> {
        let id = id.into();
        let weight = offer_amplitude.norm_sqr();
        if !weight.is_finite() || weight > 1.0 + qcore::EXACT_TOL {
            return Err(Error::InvalidAbsorber {
                id,
                reason: format!("|offer|² = {weight} is outside [0, 1]"),
            });
        }
        Ok(Absorber {
            id,
            role,
            offer_amplitude,
        })
    }

    pub fn detector(id: impl Into<String>, offer_amplitude: Complex64) -> Result<Self> {
        Absorber::new(id, AbsorberRole::Detector, offer_amplitude)
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn role(&self) -> AbsorberRole {
        self.role
    }

    pub fn offer_amplitude(&self) -> Complex64 {
        self.offer_amplitude
    }
}

/// Advanced wave returned by an absorber; its amplitude is `ψψ*`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfirmationWave {
    pub absorber: String,
    pub amplitude: f64,
}

pub fn confirmation_wave(a: &Absorber) -> ConfirmationWave {
    ConfirmationWave {
        absorber: a.id.clone(),
        amplitude: (a.offer_amplitude * a.offer_amplitude.conj()).re,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AbsorberConfiguration {
    emitter: String,
    absorbers: Vec<Absorber>,
    completeness_tolerance: f64,
}

impl AbsorberConfiguration {
    pub fn new(emitter: impl Into<String>, absorbers: Vec<Absorber>) -> Result<Self> {
        let mut seen = HashSet::new();
        for a in &absorbers {
            if !seen.insert(a.id.as_str()) {
                return Err(Error::DuplicateAbsorber(a.id.clone()));
            }
        }
        Ok(AbsorberConfiguration {
            emitter: emitter.into(),
            absorbers,
            completeness_tolerance: DEFAULT_COMPLETENESS_TOL,
        })
    }

    /// One detector per basis outcome, each receiving the offer amplitude
    /// `⟨outcome|state⟩`.
    pub fn from_state(emitter: impl Into<String>, state: &StateVector, basis: &MeasurementBasis) -> Result<Self> {
        let absorbers = qcore::decompose(state, basis)?
            .into_iter()
            .map(|(label, amp)| Absorber::detector(label, amp))
            .collect::<Result<Vec<_>>>()?;
        AbsorberConfiguration::new(emitter, absorbers)
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.completeness_tolerance = tolerance;
        self
    }

    pub fn emitter(&self) -> &str {
        &self.emitter
    }

    pub fn absorbers(&self) -> &[Absorber] {
        &self.absorbers
    }

    pub fn confirmation_waves(&self) -> Vec<ConfirmationWave> {
        self.absorbers.iter().map(confirmation_wave).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Completeness {
    Complete,
    Incomplete { deficit: f64 },
}

impl Completeness {
    pub fn is_complete(&self) -> bool {
        matches!(self, Completeness::Complete)
    }
}

/// Complete iff the confirmation amplitudes sum to 1 within tolerance.
pub fn validate_completeness(cfg: &AbsorberConfiguration) -> Completeness {
    let total: f64 = cfg.confirmation_waves().iter().map(|w| w.amplitude).sum();
    let deficit = 1.0 - total;
    if deficit.abs() <= cfg.completeness_tolerance {
        Completeness::Complete
    } else {
        Completeness::Incomplete { deficit }
    }
}

/// The completed emitter–absorber pairing of one emission event.
#[derive(Debug, Clone, PartialEq)]
pub struct Transaction {
    pub emitter: String,
    pub absorber: String,
    pub probability: f64,
    pub seed: u64,
}

/// Selects exactly one absorber with probability equal to its confirmation
/// amplitude, from a single uniform draw.
pub fn form_transaction(cfg: &AbsorberConfiguration, rng: &mut TrialRng) -> Result<Transaction> {
    if let Completeness::Incomplete { deficit } = validate_completeness(cfg) {
        return Err(Error::Incomplete { deficit });
    }
    if cfg.absorbers.is_empty() {
        return Err(Error::Incomplete { deficit: 1.0 });
    }
    let weights: Vec<f64> = cfg.confirmation_waves().iter().map(|w| w.amplitude).collect();
    let u: f64 = rng.random();
    let chosen = pick_outcome(&weights, u);
    Ok(Transaction {
        emitter: cfg.emitter.clone(),
        absorber: cfg.absorbers[chosen].id.clone(),
        probability: weights[chosen],
        seed: rng.seed(),
    })
}
