use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{config_hash, Experiment, ScenarioKind, ScenarioResult};
use crate::error::{Error, Result};
use crate::qcore::{Distribution, MeasurementBasis, Spin, StateVector};
use crate::rng::TrialRng;
use crate::transaction::{form_transaction, AbsorberConfiguration};

/// Source at the center of two absorbing shells. Only `fraction` (the share
/// of the offer wave reaching the inner shell E1) affects probabilities;
/// radii, speed and emission time are carried as metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RenningerConfig {
    pub fraction: f64,
    pub r1: f64,
    pub r2: f64,
    pub speed: f64,
    pub t0: f64,
}

impl Default for RenningerConfig {
    fn default() -> Self {
        RenningerConfig {
            fraction: 0.5,
            r1: 1.0,
            r2: 2.0,
            speed: 1.0,
            t0: 0.0,
        }
    }
}

impl RenningerConfig {
    pub fn with_fraction(fraction: f64) -> Self {
        RenningerConfig {
            fraction,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.fraction > 0.0 && self.fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "renninger.fraction must lie in (0, 1), got {}",
                self.fraction
            )));
        }
        if !(self.r1.is_finite() && self.r2.is_finite() && 0.0 < self.r1 && self.r1 < self.r2) {
            return Err(Error::InvalidConfig("renninger radii must satisfy 0 < r1 < r2".into()));
        }
        if !(self.speed.is_finite() && self.speed > 0.0 && self.t0.is_finite()) {
            return Err(Error::InvalidConfig("renninger speed must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RenningerExperiment {
    config: RenningerConfig,
    absorbers: AbsorberConfiguration,
    hash: String,
}

impl RenningerExperiment {
    pub fn new(config: RenningerConfig) -> Result<Self> {
        config.validate()?;
        let alpha = Complex64::new(config.fraction.sqrt(), 0.0);
        let beta = Complex64::new((1.0 - config.fraction).sqrt(), 0.0);
        let state = StateVector::qubit("shell", alpha, beta)?;
        let basis = MeasurementBasis::new(
            &["shell"],
            vec![
                ("E1".into(), StateVector::ket([("shell", Spin::Plus)])?),
                ("E2".into(), StateVector::ket([("shell", Spin::Minus)])?),
            ],
        )?;
        let absorbers = AbsorberConfiguration::from_state("S", &state, &basis)?;
        let hash = config_hash(ScenarioKind::Renninger, &config);
        Ok(RenningerExperiment {
            config,
            absorbers,
            hash,
        })
    }

    pub fn absorbers(&self) -> &AbsorberConfiguration {
        &self.absorbers
    }
}

impl Experiment for RenningerExperiment {
    fn kind(&self) -> ScenarioKind {
        ScenarioKind::Renninger
    }

    fn config_hash(&self) -> &str {
        &self.hash
    }

    fn analytic_distribution(&self) -> Distribution {
        self.absorbers
            .confirmation_waves()
            .into_iter()
            .map(|w| (w.absorber, w.amplitude))
            .collect()
    }

    fn trial(&self, rng: &mut TrialRng) -> ScenarioResult {
        let t = form_transaction(&self.absorbers, rng).expect("validated configuration is complete");
        ScenarioResult {
            scenario: ScenarioKind::Renninger,
            config_hash: self.hash.clone(),
            seed: t.seed,
            outcome: t.absorber.clone(),
            stages: vec![("absorber".into(), t.absorber)],
            conditional: None,
            probability: t.probability,
        }
    }

    fn metadata(&self) -> Vec<(String, f64)> {
        let c = &self.config;
        vec![
            ("r1".into(), c.r1),
            ("r2".into(), c.r2),
            ("speed".into(), c.speed),
            ("t0".into(), c.t0),
            ("t1".into(), c.t0 + c.r1 / c.speed),
            ("t2".into(), c.t0 + c.r2 / c.speed),
        ]
    }
}
