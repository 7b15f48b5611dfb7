use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use indexmap::IndexMap;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::state::{ComplexAmplitude, Spin, StateVector, SubsystemId, EXACT_TOL};
use crate::error::{Error, Result};

/// Probabilities keyed by outcome label, in basis-declaration order.
pub type Distribution = IndexMap<String, f64>;

/// Probabilities below this are treated as impossible outcomes.
pub const IMPOSSIBLE: f64 = 1e-12;

/// The four Bell states on an ordered pair of subsystems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BellKind {
    #[serde(rename = "Phi+")]
    PhiPlus,
    #[serde(rename = "Phi-")]
    PhiMinus,
    #[serde(rename = "Psi+")]
    PsiPlus,
    #[serde(rename = "Psi-")]
    PsiMinus,
}

impl BellKind {
    pub const ALL: [BellKind; 4] = [
        BellKind::PhiPlus,
        BellKind::PhiMinus,
        BellKind::PsiPlus,
        BellKind::PsiMinus,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BellKind::PhiPlus => "Phi+",
            BellKind::PhiMinus => "Phi-",
            BellKind::PsiPlus => "Psi+",
            BellKind::PsiMinus => "Psi-",
        }
    }
}

impl fmt::Display for BellKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BellKind::ALL
            .into_iter()
            .find(|k| k.label() == s)
            .ok_or_else(|| Error::UnknownOutcome(s.to_owned()))
    }
}

/// `|Φ±⟩ = (|++⟩ ± |−−⟩)/√2` and `|Ψ±⟩ = (|+−⟩ ± |−+⟩)/√2` on `(i, j)`.
pub fn bell_state(kind: BellKind, i: impl Into<SubsystemId>, j: impl Into<SubsystemId>) -> Result<StateVector> {
    let (i, j) = (i.into(), j.into());
    if i == j {
        return Err(Error::IdenticalSubsystems(i.to_string()));
    }
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::new(0.0, 0.0);
    // amplitude order: ++, +-, -+, --
    let amplitudes = match kind {
        BellKind::PhiPlus => vec![h, z, z, h],
        BellKind::PhiMinus => vec![h, z, z, -h],
        BellKind::PsiPlus => vec![z, h, h, z],
        BellKind::PsiMinus => vec![z, h, -h, z],
    };
    StateVector::new([i, j], amplitudes)
}

/// Orthonormal, complete family of outcome-labeled vectors on a set of
/// subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementBasis {
    subsystems: Vec<SubsystemId>,
    outcomes: Vec<(String, StateVector)>,
}

/// One sampled measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    pub label: String,
    pub probability: f64,
    pub state: StateVector,
}

impl MeasurementBasis {
    /// Validates orthonormality and completeness within 1e-12. Outcome
    /// vectors may list the subsystems in any order.
    pub fn new<S>(subsystems: &[S], outcomes: Vec<(String, StateVector)>) -> Result<Self>
    where
        S: Clone + Into<SubsystemId>,
    {
        let subsystems: Vec<SubsystemId> = subsystems.iter().cloned().map(Into::into).collect();
        let dim = 1usize << subsystems.len();
        if subsystems.is_empty() {
            return Err(Error::InvalidBasis("basis acts on no subsystems".into()));
        }
        if outcomes.len() != dim {
            return Err(Error::InvalidBasis(format!(
                "{} outcomes for a {}-dimensional space",
                outcomes.len(),
                dim
            )));
        }
        let mut aligned = Vec::with_capacity(dim);
        for (label, v) in outcomes {
            if aligned.iter().any(|(l, _): &(String, StateVector)| *l == label) {
                return Err(Error::InvalidBasis(format!("duplicate label `{label}`")));
            }
            let v = v
                .reorder(&subsystems)
                .map_err(|_| Error::InvalidBasis(format!("`{label}` acts on other subsystems")))?;
            aligned.push((label, v));
        }
        for (a, (la, va)) in aligned.iter().enumerate() {
            for (lb, vb) in aligned.iter().skip(a) {
                let g = va.inner(vb)?;
                let expected = if la == lb { 1.0 } else { 0.0 };
                if (g - Complex64::new(expected, 0.0)).norm() > EXACT_TOL {
                    return Err(Error::InvalidBasis(format!("⟨{la}|{lb}⟩ = {g}, expected {expected}")));
                }
            }
        }
        // resolution of identity
        for r in 0..dim {
            for c in r..dim {
                let sum: Complex64 = aligned
                    .iter()
                    .map(|(_, v)| v.amplitudes()[r] * v.amplitudes()[c].conj())
                    .sum();
                let expected = if r == c { 1.0 } else { 0.0 };
                if (sum - Complex64::new(expected, 0.0)).norm() > EXACT_TOL {
                    return Err(Error::InvalidBasis("outcomes do not resolve the identity".into()));
                }
            }
        }
        Ok(MeasurementBasis {
            subsystems,
            outcomes: aligned,
        })
    }

    /// ẑ product basis: labels are strings of `+`/`-`, one symbol per
    /// subsystem, in counting order (`++`, `+-`, `-+`, `--`).
    pub fn computational<S>(subsystems: &[S]) -> Result<Self>
    where
        S: Clone + Into<SubsystemId>,
    {
        let ids: Vec<SubsystemId> = subsystems.iter().cloned().map(Into::into).collect();
        let n = ids.len();
        let outcomes = (0..1usize << n)
            .map(|index| {
                let spins: Vec<Spin> = (0..n).map(|k| Spin::from_bit((index >> (n - 1 - k)) & 1)).collect();
                let label: String = spins.iter().map(|s| s.symbol()).collect();
                let ket = StateVector::ket(ids.iter().cloned().zip(spins))?;
                Ok((label, ket))
            })
            .collect::<Result<Vec<_>>>()?;
        MeasurementBasis::new(&ids, outcomes)
    }

    /// Bell basis on `(i, j)` in the order Φ⁺, Φ⁻, Ψ⁺, Ψ⁻.
    pub fn bell(i: impl Into<SubsystemId>, j: impl Into<SubsystemId>) -> Result<Self> {
        let (i, j) = (i.into(), j.into());
        let outcomes = BellKind::ALL
            .into_iter()
            .map(|k| Ok((k.label().to_owned(), bell_state(k, i.clone(), j.clone())?)))
            .collect::<Result<Vec<_>>>()?;
        MeasurementBasis::new(&[i, j], outcomes)
    }

    /// Tensor product of bases on disjoint subsystems. Labels concatenate in
    /// factor order; outcomes enumerate with the last factor varying fastest.
    pub fn product(factors: &[&MeasurementBasis]) -> Result<Self> {
        let mut acc: Vec<(String, StateVector)> = vec![(String::new(), StateVector::empty())];
        let mut subsystems: Vec<SubsystemId> = Vec::new();
        for f in factors {
            if let Some(dup) = f.subsystems.iter().find(|s| subsystems.contains(s)) {
                return Err(Error::SubsystemCollision(dup.to_string()));
            }
            subsystems.extend(f.subsystems.iter().cloned());
            let mut next = Vec::with_capacity(acc.len() * f.outcomes.len());
            for (la, va) in &acc {
                for (lb, vb) in &f.outcomes {
                    next.push((format!("{la}{lb}"), va.tensor(vb)?));
                }
            }
            acc = next;
        }
        MeasurementBasis::new(&subsystems, acc)
    }

    pub fn subsystems(&self) -> &[SubsystemId] {
        &self.subsystems
    }

    pub fn outcomes(&self) -> &[(String, StateVector)] {
        &self.outcomes
    }

    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.outcomes.iter().map(|(l, _)| l.as_str())
    }

    pub fn vector(&self, label: &str) -> Result<&StateVector> {
        self.outcomes
            .iter()
            .find(|(l, _)| l == label)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::UnknownOutcome(label.to_owned()))
    }

    fn check_applicable(&self, s: &StateVector) -> Result<()> {
        match self.subsystems.iter().find(|id| s.position(id).is_none()) {
            Some(id) => Err(Error::UnknownSubsystem(id.to_string())),
            None => Ok(()),
        }
    }
}

fn check_normalized(s: &StateVector) -> Result<()> {
    let n = s.norm_sqr();
    if (n - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidAmplitudes(format!("state has squared norm {n}")));
    }
    Ok(())
}

/// Coefficients of `s` in a basis spanning all of its subsystems.
pub fn decompose(s: &StateVector, basis: &MeasurementBasis) -> Result<IndexMap<String, ComplexAmplitude>> {
    if basis.subsystems.len() != s.num_subsystems() {
        return Err(Error::InvalidBasis(
            "basis must span every subsystem of the state".into(),
        ));
    }
    basis.check_applicable(s)?;
    let arranged = s.reorder(&basis.subsystems)?;
    basis
        .outcomes
        .iter()
        .map(|(label, v)| Ok((label.clone(), v.inner(&arranged)?)))
        .collect()
}

/// Born probabilities of each outcome of `basis` on the normalized state `s`.
pub fn outcome_distribution(s: &StateVector, basis: &MeasurementBasis) -> Result<Distribution> {
    basis.check_applicable(s)?;
    check_normalized(s)?;
    basis
        .outcomes
        .iter()
        .map(|(label, v)| Ok((label.clone(), s.project(v)?.norm_sqr())))
        .collect()
}

/// Normalized state of the unmeasured subsystems after `outcome`.
pub fn conditional_state(s: &StateVector, basis: &MeasurementBasis, outcome: &str) -> Result<StateVector> {
    basis.check_applicable(s)?;
    check_normalized(s)?;
    let v = basis.vector(outcome)?;
    let projected = s.project(v)?;
    let p = projected.norm_sqr();
    if p <= IMPOSSIBLE {
        return Err(Error::ImpossibleConditioning {
            label: outcome.to_owned(),
            probability: p,
        });
    }
    Ok(projected.scaled(Complex64::new(1.0 / p.sqrt(), 0.0)))
}

/// Inverse-CDF selection in declaration order. `u` is a uniform draw in
/// `[0, 1)`; rounding overshoot falls back to the last possible outcome.
pub fn pick_outcome(probabilities: &[f64], u: f64) -> usize {
    let mut cumulative = 0.0;
    let mut last_possible = 0;
    for (i, &p) in probabilities.iter().enumerate() {
        if p <= 0.0 {
            continue;
        }
        cumulative += p;
        last_possible = i;
        if u < cumulative {
            return i;
        }
    }
    last_possible
}

/// Samples one outcome with its Born probability using a single uniform draw.
pub fn measure<R: Rng + ?Sized>(s: &StateVector, basis: &MeasurementBasis, rng: &mut R) -> Result<Measurement> {
    let dist = outcome_distribution(s, basis)?;
    let probs: Vec<f64> = dist.values().copied().collect();
    let u: f64 = rng.random();
    let index = pick_outcome(&probs, u);
    let (label, probability) = dist.get_index(index).expect("nonempty basis");
    Ok(Measurement {
        label: label.clone(),
        probability: *probability,
        state: conditional_state(s, basis, label)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bell_states_match_definitions() {
        let psi_minus = bell_state(BellKind::PsiMinus, 1, 2).unwrap();
        let expected = StateVector::new([1, 2], vec![c(0.0), c(FRAC_1_SQRT_2), c(-FRAC_1_SQRT_2), c(0.0)]).unwrap();
        assert_eq!(psi_minus, expected);
        let phi_plus = bell_state(BellKind::PhiPlus, 3, 4).unwrap();
        assert_eq!(phi_plus.amplitude_of(&[Spin::Plus, Spin::Plus]), Some(c(FRAC_1_SQRT_2)));
        assert_eq!(
            phi_plus.amplitude_of(&[Spin::Minus, Spin::Minus]),
            Some(c(FRAC_1_SQRT_2))
        );
        assert!(matches!(
            bell_state(BellKind::PhiPlus, 1, 1),
            Err(Error::IdenticalSubsystems(_))
        ));
    }

    #[test]
    fn bell_states_are_orthonormal() {
        for a in BellKind::ALL {
            for b in BellKind::ALL {
                let g = bell_state(a, 1, 2)
                    .unwrap()
                    .inner(&bell_state(b, 1, 2).unwrap())
                    .unwrap();
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((g - c(expected)).norm() < EXACT_TOL);
            }
        }
        assert!(MeasurementBasis::bell(1, 2).is_ok());
    }

    #[test]
    fn basis_validation() {
        let plus = StateVector::ket([("1", Spin::Plus)]).unwrap();
        let err = MeasurementBasis::new(&["1"], vec![("a".into(), plus.clone()), ("b".into(), plus.clone())]);
        assert!(matches!(err, Err(Error::InvalidBasis(_))));
        let err = MeasurementBasis::new(&["1"], vec![("a".into(), plus)]);
        assert!(matches!(err, Err(Error::InvalidBasis(_))));
    }

    #[test]
    fn decompose_single_qubit() {
        let plus = StateVector::ket([("1", Spin::Plus)]).unwrap();
        let basis = MeasurementBasis::computational(&["1"]).unwrap();
        let d = decompose(&plus, &basis).unwrap();
        assert_eq!(d["+"], c(1.0));
        assert_eq!(d["-"], c(0.0));
        let pair = MeasurementBasis::computational(&["1", "2"]).unwrap();
        assert!(matches!(decompose(&plus, &pair), Err(Error::InvalidBasis(_))));
    }

    #[test]
    fn distribution_of_basis_ket() {
        let plus = StateVector::ket([("1", Spin::Plus)]).unwrap();
        let basis = MeasurementBasis::computational(&["1"]).unwrap();
        let d = outcome_distribution(&plus, &basis).unwrap();
        assert_eq!(d["+"], 1.0);
        assert_eq!(d["-"], 0.0);
        let other = MeasurementBasis::computational(&["7"]).unwrap();
        assert_eq!(
            outcome_distribution(&plus, &other).unwrap_err(),
            Error::UnknownSubsystem("7".into())
        );
    }

    #[test]
    fn singlet_anticorrelation() {
        let s = bell_state(BellKind::PsiMinus, 1, 2).unwrap();
        let basis = MeasurementBasis::computational(&["1"]).unwrap();
        let rest = conditional_state(&s, &basis, "+").unwrap();
        let minus = StateVector::ket([("2", Spin::Minus)]).unwrap();
        assert!((rest.fidelity(&minus).unwrap() - 1.0).abs() < EXACT_TOL);
    }

    #[test]
    fn impossible_conditioning() {
        let plus = StateVector::ket([("1", Spin::Plus), ("2", Spin::Plus)]).unwrap();
        let basis = MeasurementBasis::computational(&["1"]).unwrap();
        assert!(matches!(
            conditional_state(&plus, &basis, "-"),
            Err(Error::ImpossibleConditioning { .. })
        ));
    }

    #[test]
    fn measure_is_deterministic_given_seed() {
        let s = bell_state(BellKind::PsiMinus, 1, 2).unwrap();
        let basis = MeasurementBasis::computational(&["1"]).unwrap();
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..50)
                .map(|_| measure(&s, &basis, &mut rng).unwrap().label)
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
    }

    #[test]
    fn pick_outcome_skips_impossible() {
        assert_eq!(pick_outcome(&[0.0, 0.5, 0.0, 0.5], 0.0), 1);
        assert_eq!(pick_outcome(&[0.0, 0.5, 0.0, 0.5], 0.5), 3);
        assert_eq!(pick_outcome(&[0.5, 0.5 - 1e-16, 0.0], 0.99999999999999999), 1);
    }
}
