use std::collections::BTreeMap;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};
use statrs::distribution::{Binomial, DiscreteCDF};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::qcore::Distribution;
use crate::scenarios::ScenarioResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyEntry {
    pub count: u64,
    pub frequency: f64,
    /// Binomial standard error `sqrt(p̂(1 − p̂)/N)`.
    pub sigma: f64,
}

/// Observed outcome counts, labels in lexicographic order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    trials: u64,
    entries: IndexMap<String, FrequencyEntry>,
}

impl FrequencyTable {
    pub fn from_labels<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut trials = 0u64;
        for l in labels {
            *counts.entry(l.as_ref().to_owned()).or_default() += 1;
            trials += 1;
        }
        if trials == 0 {
            return Err(Error::EmptyEnsemble);
        }
        let n = trials as f64;
        let entries = counts
            .into_iter()
            .map(|(label, count)| {
                let p = count as f64 / n;
                let entry = FrequencyEntry {
                    count,
                    frequency: p,
                    sigma: (p * (1.0 - p) / n).sqrt(),
                };
                (label, entry)
            })
            .collect();
        Ok(FrequencyTable { trials, entries })
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn get(&self, label: &str) -> Option<&FrequencyEntry> {
        self.entries.get(label)
    }

    pub fn count(&self, label: &str) -> u64 {
        self.entries.get(label).map_or(0, |e| e.count)
    }

    pub fn frequency(&self, label: &str) -> f64 {
        self.entries.get(label).map_or(0.0, |e| e.frequency)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &FrequencyEntry)> {
        self.entries.iter().map(|(l, e)| (l.as_str(), e))
    }
}

/// Counts the `outcome` labels of results from a single scenario run.
pub fn tabulate(results: &[ScenarioResult]) -> Result<FrequencyTable> {
    let first = results.first().ok_or(Error::EmptyEnsemble)?;
    if results
        .iter()
        .any(|r| r.scenario != first.scenario || r.config_hash != first.config_hash)
    {
        return Err(Error::MixedResults);
    }
    FrequencyTable::from_labels(results.iter().map(|r| r.outcome.as_str()))
}

/// Counts one named stage of each result (for example Eve's outcome alone).
pub fn tabulate_stage(results: &[ScenarioResult], stage: &str) -> Result<FrequencyTable> {
    tabulate(results)?;
    let labels = results
        .iter()
        .map(|r| {
            r.stage(stage)
                .ok_or_else(|| Error::UnknownOutcome(format!("stage `{stage}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    FrequencyTable::from_labels(labels)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub label: String,
    pub count: u64,
    pub frequency: f64,
    pub sigma: f64,
    pub analytic_p: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub pass: bool,
    pub k_sigma: f64,
    pub rows: Vec<ComparisonRow>,
}

impl Comparison {
    pub fn failures(&self) -> impl Iterator<Item = &ComparisonRow> {
        self.rows.iter().filter(|r| !r.pass)
    }
}

/// Two-sided normal tail mass beyond `k` standard deviations.
fn normal_tail(k: f64) -> f64 {
    erfc(k / std::f64::consts::SQRT_2)
}

fn row_passes(count: u64, n: u64, p: f64, k_sigma: f64) -> bool {
    let nf = n as f64;
    if p <= 0.0 {
        return count == 0;
    }
    if p >= 1.0 {
        return count == n;
    }
    if nf * p < 10.0 || nf * (1.0 - p) < 10.0 {
        let b = Binomial::new(p, n).expect("p in (0, 1)");
        let lower = b.cdf(count);
        let upper = if count == 0 { 1.0 } else { b.sf(count - 1) };
        let p_value = (2.0 * lower.min(upper)).min(1.0);
        return p_value >= normal_tail(k_sigma);
    }
    let f = count as f64 / nf;
    let sigma = (p * (1.0 - p) / nf).sqrt();
    (f - p).abs() <= k_sigma * sigma
}

/// Checks every observed frequency against its analytic probability at
/// `k_sigma` binomial standard deviations (σ from the analytic `p`), falling
/// back to an exact binomial test when fewer than 10 events are expected.
pub fn compare(freqs: &FrequencyTable, analytic: &Distribution, k_sigma: f64) -> Result<Comparison> {
    if let Some((label, _)) = freqs.iter().find(|(l, _)| !analytic.contains_key(*l)) {
        return Err(Error::LabelMismatch(format!(
            "observed `{label}` has no analytic probability"
        )));
    }
    let n = freqs.trials();
    let rows: Vec<ComparisonRow> = analytic
        .iter()
        .map(|(label, &p)| {
            let (count, frequency, sigma) = freqs
                .get(label)
                .map_or((0, 0.0, 0.0), |e| (e.count, e.frequency, e.sigma));
            ComparisonRow {
                label: label.clone(),
                count,
                frequency,
                sigma,
                analytic_p: p,
                pass: row_passes(count, n, p, k_sigma),
            }
        })
        .collect();
    Ok(Comparison {
        pass: rows.iter().all(|r| r.pass),
        k_sigma,
        rows,
    })
}

/// Two-sample check: every label's frequencies agree within `k_sigma`
/// pooled binomial standard errors.
pub fn compare_two_sample(a: &FrequencyTable, b: &FrequencyTable, k_sigma: f64) -> bool {
    let labels: std::collections::BTreeSet<&str> = a.iter().chain(b.iter()).map(|(l, _)| l).collect();
    let (na, nb) = (a.trials() as f64, b.trials() as f64);
    labels.into_iter().all(|l| {
        let (ca, cb) = (a.count(l) as f64, b.count(l) as f64);
        let pooled = (ca + cb) / (na + nb);
        let sigma = (pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb)).sqrt();
        (ca / na - cb / nb).abs() <= k_sigma * sigma
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(pairs: &[(&str, f64)]) -> Distribution {
        pairs.iter().map(|(l, p)| (l.to_string(), *p)).collect()
    }

    #[test]
    fn all_same_label() {
        let t = FrequencyTable::from_labels(std::iter::repeat_n("E1", 10)).unwrap();
        assert_eq!(
            *t.get("E1").unwrap(),
            FrequencyEntry {
                count: 10,
                frequency: 1.0,
                sigma: 0.0
            }
        );
    }

    #[test]
    fn empty_is_error() {
        assert_eq!(
            FrequencyTable::from_labels(Vec::<&str>::new()).unwrap_err(),
            Error::EmptyEnsemble
        );
        assert_eq!(tabulate(&[]).unwrap_err(), Error::EmptyEnsemble);
    }

    #[test]
    fn exact_match_passes() {
        let labels = std::iter::repeat_n("a", 500).chain(std::iter::repeat_n("b", 500));
        let t = FrequencyTable::from_labels(labels).unwrap();
        for k in [0.0, 1.0, 5.0] {
            assert!(compare(&t, &dist(&[("a", 0.5), ("b", 0.5)]), k).unwrap().pass);
        }
    }

    #[test]
    fn large_deviation_fails() {
        let n = 100_000;
        let labels = std::iter::repeat_n("a", n * 6 / 10).chain(std::iter::repeat_n("b", n * 4 / 10));
        let t = FrequencyTable::from_labels(labels).unwrap();
        let c = compare(&t, &dist(&[("a", 0.5), ("b", 0.5)]), 5.0).unwrap();
        assert!(!c.pass);
        assert_eq!(c.failures().count(), 2);
    }

    #[test]
    fn unobserved_labels_count_zero_and_unknown_labels_error() {
        let t = FrequencyTable::from_labels(["a", "a"]).unwrap();
        let c = compare(&t, &dist(&[("a", 1.0), ("b", 0.0)]), 4.0).unwrap();
        assert!(c.pass);
        assert_eq!(c.rows[1].count, 0);
        assert!(matches!(
            compare(&t, &dist(&[("b", 1.0)]), 4.0),
            Err(Error::LabelMismatch(_))
        ));
    }

    #[test]
    fn zero_probability_outcome_must_not_occur() {
        let t = FrequencyTable::from_labels(["a", "a", "c"]).unwrap();
        let c = compare(&t, &dist(&[("a", 1.0), ("c", 0.0)]), 100.0).unwrap();
        assert!(!c.pass);
    }

    #[test]
    fn exact_binomial_fallback() {
        // expected 1 event in 1000; seeing 3 is unremarkable, 15 is not
        let make = |hits: usize| {
            FrequencyTable::from_labels(std::iter::repeat_n("x", hits).chain(std::iter::repeat_n("y", 1000 - hits)))
                .unwrap()
        };
        let d = dist(&[("x", 0.001), ("y", 0.999)]);
        assert!(compare(&make(3), &d, 4.0).unwrap().pass);
        assert!(!compare(&make(15), &d, 4.0).unwrap().pass);
    }

    #[test]
    fn two_sample() {
        let a = FrequencyTable::from_labels(["x", "y", "x", "y"]).unwrap();
        let b = FrequencyTable::from_labels(["y", "x", "y", "x"]).unwrap();
        assert!(compare_two_sample(&a, &b, 1.0));
        let c = FrequencyTable::from_labels(std::iter::repeat_n("x", 10_000)).unwrap();
        let d = FrequencyTable::from_labels(std::iter::repeat_n("y", 10_000)).unwrap();
        assert!(!compare_two_sample(&c, &d, 5.0));
    }
}
