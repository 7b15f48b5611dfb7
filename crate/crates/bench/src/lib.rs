//! Fixtures shared by the criterion benchmarks.

use tisim_core::qcore::{bell_state, BellKind, MeasurementBasis, StateVector};

/// `|Ψ⁻⟩₁₂ ⊗ |Ψ⁻⟩₃₄`.
pub fn swap_state() -> StateVector {
    bell_state(BellKind::PsiMinus, 1, 2)
        .and_then(|a| a.tensor(&bell_state(BellKind::PsiMinus, 3, 4)?))
        .expect("valid state")
}

/// Bell basis on (1, 4) tensored with the Bell basis on (2, 3).
pub fn bell_pair_basis() -> MeasurementBasis {
    let a = MeasurementBasis::bell(1, 4).expect("valid basis");
    let b = MeasurementBasis::bell(2, 3).expect("valid basis");
    MeasurementBasis::product(&[&a, &b]).expect("disjoint factors")
}
