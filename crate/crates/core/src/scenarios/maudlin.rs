use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{config_hash, Experiment, ScenarioKind, ScenarioResult};
use crate::error::{Error, Result};
use crate::qcore::{Distribution, MeasurementBasis, Spin, StateVector};
use crate::rng::TrialRng;
use crate::transaction::{form_transaction, validate_completeness, Absorber, AbsorberConfiguration, Completeness};

/// A slow particle leaves S to the left or right with amplitude 1/√2 each.
/// A sits on the right with B behind it; if A does not fire, B swings left.
/// C is the optional absorber at the far left.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MaudlinConfig {
    pub far_left_absorber: bool,
}

#[derive(Debug, Clone)]
pub struct MaudlinExperiment {
    absorbers: AbsorberConfiguration,
    hash: String,
}

impl MaudlinExperiment {
    /// Fails with [`Error::Incomplete`] when nothing absorbs the left-going
    /// part of the offer wave.
    pub fn new(config: MaudlinConfig) -> Result<Self> {
        let absorbers = Self::absorbers_for(&config)?;
        if let Completeness::Incomplete { deficit } = validate_completeness(&absorbers) {
            return Err(Error::Incomplete { deficit });
        }
        let hash = config_hash(ScenarioKind::Maudlin, &config);
        Ok(MaudlinExperiment { absorbers, hash })
    }

    /// Absorbers as seen by the emission-time offer wave: A takes the right
    /// branch, B is shadowed behind A, C (if present) takes the left branch.
    pub fn absorbers_for(config: &MaudlinConfig) -> Result<AbsorberConfiguration> {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let direction = StateVector::qubit("direction", h, h)?;
        let left = MeasurementBasis::new(
            &["direction"],
            vec![
                ("right".into(), StateVector::ket([("direction", Spin::Plus)])?),
                ("left".into(), StateVector::ket([("direction", Spin::Minus)])?),
            ],
        )?;
        let branches = crate::qcore::decompose(&direction, &left)?;
        let mut absorbers = vec![
            Absorber::detector("A", branches["right"])?,
            Absorber::detector("B", Complex64::new(0.0, 0.0))?,
        ];
        if config.far_left_absorber {
            absorbers.push(Absorber::detector("C", branches["left"])?);
        }
        AbsorberConfiguration::new("S", absorbers)
    }

    pub fn absorbers(&self) -> &AbsorberConfiguration {
        &self.absorbers
    }
}

impl Experiment for MaudlinExperiment {
    fn kind(&self) -> ScenarioKind {
        ScenarioKind::Maudlin
    }

    fn config_hash(&self) -> &str {
        &self.hash
    }

    fn analytic_distribution(&self) -> Distribution {
        let weight = |id: &str| {
            self.absorbers
                .confirmation_waves()
                .into_iter()
                .find(|w| w.absorber == id)
                .map_or(0.0, |w| w.amplitude)
        };
        // B swings left and intercepts the whole left branch before C
        Distribution::from([
            ("A".to_string(), weight("A")),
            ("B".to_string(), weight("B") + weight("C")),
            ("C".to_string(), 0.0),
        ])
    }

    fn trial(&self, rng: &mut TrialRng) -> ScenarioResult {
        let t = form_transaction(&self.absorbers, rng).expect("validated configuration is complete");
        let (direction, absorber) = match t.absorber.as_str() {
            "A" => ("right", "A"),
            _ => ("left", "B"),
        };
        ScenarioResult {
            scenario: ScenarioKind::Maudlin,
            config_hash: self.hash.clone(),
            seed: t.seed,
            outcome: absorber.to_owned(),
            stages: vec![
                ("direction".into(), direction.into()),
                ("absorber".into(), absorber.into()),
            ],
            conditional: None,
            probability: t.probability,
        }
    }
}
