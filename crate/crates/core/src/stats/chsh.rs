use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{spin_correlation, MeasurementAxis, StateVector, SubsystemId, IMPOSSIBLE};
use crate::rng::TrialRng;
use crate::scenarios::{SwapConfig, SwapExperiment};

/// Axes `a`, `a′` for the first particle and `b`, `b′` for the second.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSetting {
    pub a: MeasurementAxis,
    pub a_prime: MeasurementAxis,
    pub b: MeasurementAxis,
    pub b_prime: MeasurementAxis,
}

impl ChshSetting {
    /// The four `(first, second)` axis pairs with their sign in
    /// `S = E(a,b) − E(a,b′) + E(a′,b) + E(a′,b′)`.
    pub fn terms(&self) -> [(MeasurementAxis, MeasurementAxis, f64); 4] {
        [
            (self.a, self.b, 1.0),
            (self.a, self.b_prime, -1.0),
            (self.a_prime, self.b, 1.0),
            (self.a_prime, self.b_prime, 1.0),
        ]
    }
}

/// CHSH angles in the x–z plane (radians from ẑ) and the Eve outcome the
/// sampled estimate conditions on. The defaults reach `|S| = 2√2` on |Ψ⁺⟩.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChshConfig {
    pub a: f64,
    pub a_prime: f64,
    pub b: f64,
    pub b_prime: f64,
    pub condition: String,
}

impl Default for ChshConfig {
    fn default() -> Self {
        ChshConfig {
            a: 0.0,
            a_prime: FRAC_PI_2,
            b: -FRAC_PI_4,
            b_prime: -3.0 * FRAC_PI_4,
            condition: "Psi+".into(),
        }
    }
}

impl ChshConfig {
    pub fn setting(&self) -> ChshSetting {
        ChshSetting {
            a: MeasurementAxis::in_xz_plane(self.a),
            a_prime: MeasurementAxis::in_xz_plane(self.a_prime),
            b: MeasurementAxis::in_xz_plane(self.b),
            b_prime: MeasurementAxis::in_xz_plane(self.b_prime),
        }
    }
}

/// Exact CHSH value of `state` for particles `i` and `j`.
pub fn chsh(state: &StateVector, i: &SubsystemId, j: &SubsystemId, s: &ChshSetting) -> Result<f64> {
    s.terms().iter().try_fold(0.0, |acc, (a, b, sign)| {
        Ok(acc + sign * spin_correlation(state, i, a, j, b)?)
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChshEstimate {
    pub s: f64,
    pub sigma: f64,
    /// Sampled `E` for each of the four terms, in [`ChshSetting::terms`] order.
    pub correlations: [f64; 4],
    /// Accepted (condition-matching) trials per term.
    pub accepted: [u64; 4],
}

/// Monte Carlo CHSH estimate for particles 1 and 4 of the swap experiment,
/// keeping only trials whose Eve outcome equals `condition`.
///
/// Trial `t` measures with the axis pair `t mod 4` and draws from
/// `TrialRng::for_trial(master_seed, t)`. Each correlation's standard error
/// is `sqrt((1 − E²)/n)`; they add in quadrature.
pub fn chsh_sampled(
    config: &SwapConfig,
    setting: &ChshSetting,
    condition: &str,
    trials: u64,
    master_seed: u64,
) -> Result<ChshEstimate> {
    if trials == 0 {
        return Err(Error::EmptyEnsemble);
    }
    let experiments = setting
        .terms()
        .iter()
        .map(|(a, b, _)| SwapExperiment::new(config.clone().with_axes(*a, *b)))
        .collect::<Result<Vec<_>>>()?;
    let branch = experiments[0]
        .eve_branches()?
        .into_iter()
        .find(|b| b.label == condition)
        .ok_or_else(|| Error::UnknownOutcome(condition.to_owned()))?;
    if branch.probability <= IMPOSSIBLE {
        return Err(Error::ImpossibleConditioning {
            label: condition.to_owned(),
            probability: branch.probability,
        });
    }
    // per term: (accepted, sum of ±1 products)
    let tallies = (0..trials)
        .into_par_iter()
        .fold(
            || [(0u64, 0i64); 4],
            |mut acc, t| {
                let k = (t % 4) as usize;
                let mut rng = TrialRng::for_trial(master_seed, t);
                let (eve, one, four) = experiments[k].sample_labels(&mut rng);
                if eve == condition {
                    let product = if (one == "+") == (four == "+") { 1 } else { -1 };
                    acc[k].0 += 1;
                    acc[k].1 += product;
                }
                acc
            },
        )
        .reduce(
            || [(0u64, 0i64); 4],
            |mut x, y| {
                for k in 0..4 {
                    x[k].0 += y[k].0;
                    x[k].1 += y[k].1;
                }
                x
            },
        );
    let mut correlations = [0.0; 4];
    let mut accepted = [0u64; 4];
    let mut s = 0.0;
    let mut variance = 0.0;
    for (k, (_, _, sign)) in setting.terms().iter().enumerate() {
        let (n, sum) = tallies[k];
        if n == 0 {
            return Err(Error::EmptyEnsemble);
        }
        let e = sum as f64 / n as f64;
        correlations[k] = e;
        accepted[k] = n;
        s += sign * e;
        variance += (1.0 - e * e) / n as f64;
    }
    Ok(ChshEstimate {
        s,
        sigma: variance.sqrt(),
        correlations,
        accepted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{bell_state, BellKind, Spin};

    #[test]
    fn psi_plus_reaches_tsirelson() {
        let s = bell_state(BellKind::PsiPlus, 1, 4).unwrap();
        let v = chsh(&s, &1.into(), &4.into(), &ChshConfig::default().setting()).unwrap();
        assert!((v.abs() - 2.0 * 2f64.sqrt()).abs() < 1e-9);
    }

    #[test]
    fn product_state_is_local() {
        let s = StateVector::ket([("1", Spin::Plus), ("4", Spin::Plus)]).unwrap();
        let v = chsh(&s, &1.into(), &4.into(), &ChshConfig::default().setting()).unwrap();
        assert!(v.abs() <= 2.0 + 1e-9);
    }

    #[test]
    fn zero_trials_is_an_error() {
        let r = chsh_sampled(&SwapConfig::default(), &ChshConfig::default().setting(), "Psi+", 0, 1);
        assert_eq!(r.unwrap_err(), Error::EmptyEnsemble);
    }

    #[test]
    fn unknown_condition() {
        let r = chsh_sampled(&SwapConfig::default(), &ChshConfig::default().setting(), "nope", 10, 1);
        assert!(matches!(r, Err(Error::UnknownOutcome(_))));
    }
}
