use std::f64::consts::{FRAC_1_SQRT_2, PI};

use num_complex::Complex64;
use proptest::prelude::*;

use tisim_core::qcore::{outcome_distribution, MeasurementBasis, StateVector};
use tisim_core::stats::{compare, FrequencyTable};
use tisim_core::transaction::*;
use tisim_core::{Error, TrialRng};

fn amplitudes(weights: &[f64], phases: &[f64]) -> Vec<Complex64> {
    let total: f64 = weights.iter().sum();
    weights
        .iter()
        .zip(phases)
        .map(|(w, ph)| Complex64::from_polar((w / total).sqrt(), *ph))
        .collect()
}

fn config(amps: &[Complex64]) -> AbsorberConfiguration {
    let absorbers = amps
        .iter()
        .enumerate()
        .map(|(k, a)| Absorber::detector(format!("D{k}"), *a).unwrap())
        .collect();
    AbsorberConfiguration::new("S", absorbers).unwrap()
}

#[test]
fn one_transaction_per_draw() {
    let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let cfg = config(&[h, h]);
    let mut seen = Vec::new();
    for i in 0..1000 {
        let t = form_transaction(&cfg, &mut TrialRng::for_trial(8, i)).unwrap();
        assert_eq!(t.emitter, "S");
        assert!(t.absorber == "D0" || t.absorber == "D1");
        assert!((t.probability - 0.5).abs() < 1e-12);
        seen.push(t.absorber);
    }
    let t = FrequencyTable::from_labels(&seen).unwrap();
    assert!(t.count("D0") > 0 && t.count("D1") > 0);
}

#[test]
fn same_seed_same_transaction() {
    let cfg = config(&amplitudes(&[1.0, 2.0, 3.0], &[0.0, 1.0, 2.0]));
    for i in 0..100 {
        let a = form_transaction(&cfg, &mut TrialRng::for_trial(11, i)).unwrap();
        let b = form_transaction(&cfg, &mut TrialRng::for_trial(11, i)).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn confirmation_matches_born_rule_of_the_state() {
    let state = StateVector::new(
        ["q0", "q1"],
        vec![
            Complex64::new(0.5, 0.1),
            Complex64::new(-0.3, 0.4),
            Complex64::new(0.0, -0.6),
            Complex64::new(0.2, 0.0),
        ],
    )
    .unwrap()
    .normalize()
    .unwrap();
    let basis = MeasurementBasis::computational(&["q0", "q1"]).unwrap();
    let cfg = AbsorberConfiguration::from_state("S", &state, &basis).unwrap();
    let born = outcome_distribution(&state, &basis).unwrap();
    for w in cfg.confirmation_waves() {
        assert!((w.amplitude - born[w.absorber.as_str()]).abs() < 1e-12);
    }
    assert!(validate_completeness(&cfg).is_complete());
}

#[test]
fn partial_coverage_reports_deficit() {
    let cfg = config(&[Complex64::new(FRAC_1_SQRT_2, 0.0)]);
    match validate_completeness(&cfg) {
        Completeness::Incomplete { deficit } => assert!((deficit - 0.5).abs() < 1e-12),
        Completeness::Complete => panic!("half the offer wave is unabsorbed"),
    }
    match form_transaction(&cfg, &mut TrialRng::from_seed(0)) {
        Err(Error::Incomplete { deficit }) => assert!((deficit - 0.5).abs() < 1e-12),
        other => panic!("{other:?}"),
    }
}

#[test]
fn sampled_transactions_follow_weights() {
    let weights = [0.1, 0.2, 0.3, 0.4];
    let cfg = config(&amplitudes(&weights, &[0.0; 4]));
    let labels: Vec<String> = (0..100_000)
        .map(|i| {
            form_transaction(&cfg, &mut TrialRng::for_trial(21, i))
                .unwrap()
                .absorber
        })
        .collect();
    let table = FrequencyTable::from_labels(&labels).unwrap();
    let analytic = (0..4).map(|k| (format!("D{k}"), weights[k])).collect();
    assert!(compare(&table, &analytic, 5.0).unwrap().pass);
}

proptest! {
    #[test]
    fn confirmation_ignores_offer_phase(
        weights in prop::collection::vec(0.01f64..1.0, 1..6),
        phases in prop::collection::vec(-PI..PI, 6),
        shift in prop::collection::vec(-PI..PI, 6),
    ) {
        let a = config(&amplitudes(&weights, &phases));
        let shifted: Vec<f64> = phases.iter().zip(&shift).map(|(p, s)| p + s).collect();
        let b = config(&amplitudes(&weights, &shifted));
        for (x, y) in a.confirmation_waves().iter().zip(b.confirmation_waves()) {
            prop_assert_eq!(&x.absorber, &y.absorber);
            prop_assert!((x.amplitude - y.amplitude).abs() < 1e-12);
        }
        // same weights, same draws
        for i in 0..8 {
            let ta = form_transaction(&a, &mut TrialRng::for_trial(3, i)).unwrap();
            let tb = form_transaction(&b, &mut TrialRng::for_trial(3, i)).unwrap();
            prop_assert_eq!(ta.absorber, tb.absorber);
        }
    }

    #[test]
    fn incomplete_never_transacts(
        weights in prop::collection::vec(0.01f64..1.0, 2..6),
        drop in 0usize..6,
        seed in any::<u64>(),
    ) {
        let amps = amplitudes(&weights, &vec![0.0; weights.len()]);
        let drop = drop % amps.len();
        let kept: Vec<Complex64> = amps.iter().enumerate().filter(|(k, _)| *k != drop).map(|(_, a)| *a).collect();
        let cfg = config(&kept);
        let missing = amps[drop].norm_sqr();
        prop_assume!(missing > 1e-6);
        match validate_completeness(&cfg) {
            Completeness::Incomplete { deficit } => prop_assert!((deficit - missing).abs() < 1e-9),
            Completeness::Complete => prop_assert!(false, "missing weight {}", missing),
        }
        let is_incomplete = matches!(form_transaction(&cfg, &mut TrialRng::from_seed(seed)), Err(Error::Incomplete { .. }));
        prop_assert!(is_incomplete);
    }
}
