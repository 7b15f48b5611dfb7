use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{config_hash, Experiment, ScenarioKind, ScenarioResult};
use crate::error::{Error, Result};
use crate::qcore::{pick_outcome, Distribution, Spin, StateVector, EXACT_TOL, IMPOSSIBLE};
use crate::rng::TrialRng;

/// Outcome labels in sampling order.
pub const LIAR_OUTCOMES: [&str; 4] = ["atom1", "atom2", "C", "D"];

/// Mach–Zehnder interferometer with one atom in each arm.
///
/// Both beam splitters use `(1/√2)[[1, −e^{−iφ}], [e^{iφ}, 1]]` with `φ` the
/// reflection phase; with the photon entering port 0 the unobstructed
/// interferometer never fires output port 0, which is detector D. Output
/// port 1 is detector C. Atom `k` sits in arm `k` and absorbs the photon iff
/// it is in its blocking ẑ eigenstate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct QuantumLiarConfig {
    pub reflection_phase: f64,
    pub blocking: [Spin; 2],
}

impl Default for QuantumLiarConfig {
    fn default() -> Self {
        QuantumLiarConfig {
            reflection_phase: FRAC_PI_2,
            blocking: [Spin::Plus, Spin::Plus],
        }
    }
}

impl QuantumLiarConfig {
    pub fn beam_splitter(&self) -> [[Complex64; 2]; 2] {
        let h = FRAC_1_SQRT_2;
        let r = Complex64::from_polar(h, self.reflection_phase);
        [[Complex64::new(h, 0.0), -r.conj()], [r, Complex64::new(h, 0.0)]]
    }

    pub fn validate(&self) -> Result<()> {
        if !self.reflection_phase.is_finite() {
            return Err(Error::InvalidConfig(
                "quantum_liar.reflection_phase must be finite".into(),
            ));
        }
        let u = self.beam_splitter();
        for r in 0..2 {
            for c in 0..2 {
                let uu: Complex64 = (0..2).map(|k| u[r][k] * u[c][k].conj()).sum();
                let expected = if r == c { 1.0 } else { 0.0 };
                if (uu - Complex64::new(expected, 0.0)).norm() > EXACT_TOL {
                    return Err(Error::InvalidConfig("beam splitter is not unitary".into()));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct QuantumLiarExperiment {
    hash: String,
    probabilities: [f64; 4],
    /// Normalized two-atom state for each outcome, `None` if impossible.
    conditionals: [Option<StateVector>; 4],
}

const PHOTON: &str = "photon";
const ATOM1: &str = "atom1";
const ATOM2: &str = "atom2";

impl QuantumLiarExperiment {
    pub fn new(config: QuantumLiarConfig) -> Result<Self> {
        config.validate()?;
        let bs = config.beam_splitter();
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let photon = StateVector::ket([(PHOTON, Spin::Plus)])?;
        let atom1 = StateVector::qubit(ATOM1, h, h)?;
        let atom2 = StateVector::qubit(ATOM2, h, h)?;
        let initial = photon.tensor(&atom1)?.tensor(&atom2)?;
        let split = initial.apply_single(&bs, &PHOTON.into())?;

        // basis index bits: photon = 4, atom1 = 2, atom2 = 1
        let block1 = config.blocking[0].bit();
        let block2 = config.blocking[1].bit();
        let absorbed_by_1 = |i: usize| (i >> 2) & 1 == 0 && (i >> 1) & 1 == block1;
        let absorbed_by_2 = |i: usize| (i >> 2) & 1 == 1 && i & 1 == block2;
        let keep = |pred: &dyn Fn(usize) -> bool| -> Result<StateVector> {
            let amps = split
                .amplitudes()
                .iter()
                .enumerate()
                .map(|(i, a)| if pred(i) { *a } else { Complex64::new(0.0, 0.0) })
                .collect();
            StateVector::new(split.subsystems().to_vec(), amps)
        };
        let hit1 = keep(&absorbed_by_1)?;
        let hit2 = keep(&absorbed_by_2)?;
        let passed = keep(&|i| !absorbed_by_1(i) && !absorbed_by_2(i))?;
        let recombined = passed.apply_single(&bs, &PHOTON.into())?;

        let port = |spin| StateVector::ket([(PHOTON, spin)]);
        let branches = [
            hit1.project(&port(Spin::Plus)?)?,
            hit2.project(&port(Spin::Minus)?)?,
            recombined.project(&port(Spin::Minus)?)?,
            recombined.project(&port(Spin::Plus)?)?,
        ];
        let probabilities = branches.each_ref().map(StateVector::norm_sqr);
        let conditionals = branches.map(|b| {
            let p = b.norm_sqr();
            (p > IMPOSSIBLE).then(|| b.scaled(Complex64::new(1.0 / p.sqrt(), 0.0)))
        });
        Ok(QuantumLiarExperiment {
            hash: config_hash(ScenarioKind::QuantumLiar, &config),
            probabilities,
            conditionals,
        })
    }

    /// Two-atom state left behind by `outcome`.
    pub fn conditional(&self, outcome: &str) -> Result<&StateVector> {
        let index = LIAR_OUTCOMES
            .iter()
            .position(|o| *o == outcome)
            .ok_or_else(|| Error::UnknownOutcome(outcome.to_owned()))?;
        self.conditionals[index]
            .as_ref()
            .ok_or_else(|| Error::ImpossibleConditioning {
                label: outcome.to_owned(),
                probability: self.probabilities[index],
            })
    }
}

impl Experiment for QuantumLiarExperiment {
    fn kind(&self) -> ScenarioKind {
        ScenarioKind::QuantumLiar
    }

    fn config_hash(&self) -> &str {
        &self.hash
    }

    fn analytic_distribution(&self) -> Distribution {
        LIAR_OUTCOMES
            .iter()
            .zip(self.probabilities)
            .map(|(l, p)| (l.to_string(), p))
            .collect()
    }

    fn trial(&self, rng: &mut TrialRng) -> ScenarioResult {
        use rand::Rng;
        let seed = rng.seed();
        let index = pick_outcome(&self.probabilities, rng.random());
        let outcome = LIAR_OUTCOMES[index].to_owned();
        ScenarioResult {
            scenario: ScenarioKind::QuantumLiar,
            config_hash: self.hash.clone(),
            seed,
            stages: vec![("absorber".into(), outcome.clone())],
            outcome,
            conditional: self.conditionals[index].clone(),
            probability: self.probabilities[index],
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{bell_state, schmidt_coefficients, BellKind, SVD_TOL};

    #[test]
    fn probabilities_sum_to_one() {
        let e = QuantumLiarExperiment::new(QuantumLiarConfig::default()).unwrap();
        let total: f64 = e.analytic_distribution().values().sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dark_port_leaves_atoms_maximally_entangled() {
        for blocking in [
            [Spin::Plus, Spin::Plus],
            [Spin::Plus, Spin::Minus],
            [Spin::Minus, Spin::Plus],
            [Spin::Minus, Spin::Minus],
        ] {
            for phase in [FRAC_PI_2, 0.3, -1.1] {
                let e = QuantumLiarExperiment::new(QuantumLiarConfig {
                    reflection_phase: phase,
                    blocking,
                })
                .unwrap();
                let d = e.conditional("D").unwrap();
                let c = schmidt_coefficients(d, &[ATOM1.into()]).unwrap();
                assert!((c[0] - FRAC_1_SQRT_2).abs() < SVD_TOL, "{blocking:?} {phase}");
                assert!((c[1] - FRAC_1_SQRT_2).abs() < SVD_TOL);
            }
        }
    }

    #[test]
    fn default_convention_gives_singlet() {
        let e = QuantumLiarExperiment::new(QuantumLiarConfig::default()).unwrap();
        let psi_minus = bell_state(BellKind::PsiMinus, ATOM1, ATOM2).unwrap();
        let f = psi_minus.fidelity(e.conditional("D").unwrap()).unwrap();
        assert!(f > 1.0 - 1e-9);
    }

    #[test]
    fn atom_absorption_records_which_path() {
        let e = QuantumLiarExperiment::new(QuantumLiarConfig::default()).unwrap();
        let s = e.conditional("atom1").unwrap();
        let c = schmidt_coefficients(s, &[ATOM1.into()]).unwrap();
        assert!(c[1].abs() < SVD_TOL);
        let plus_then_any = StateVector::ket([(ATOM1, Spin::Plus)])
            .unwrap()
            .tensor(
                &StateVector::qubit(
                    ATOM2,
                    Complex64::new(FRAC_1_SQRT_2, 0.0),
                    Complex64::new(FRAC_1_SQRT_2, 0.0),
                )
                .unwrap(),
            )
            .unwrap();
        assert!((s.fidelity(&plus_then_any).unwrap() - 1.0).abs() < 1e-12);
    }
}
