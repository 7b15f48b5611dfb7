use nalgebra::DMatrix;

use super::state::{StateVector, SubsystemId};
use crate::error::{Error, Result};

/// Tolerance for checks that go through a singular value decomposition.
pub const SVD_TOL: f64 = 1e-9;

/// Schmidt coefficients of `s` across `left | rest`, in descending order.
///
/// The list has `min(2^|left|, 2^|rest|)` entries, zeros included.
pub fn schmidt_coefficients(s: &StateVector, left: &[SubsystemId]) -> Result<Vec<f64>> {
    if left.is_empty() || left.len() >= s.num_subsystems() {
        return Err(Error::TrivialBipartition);
    }
    for id in left {
        if s.position(id).is_none() {
            return Err(Error::UnknownSubsystem(id.to_string()));
        }
    }
    let mut order: Vec<SubsystemId> = left.to_vec();
    order.extend(s.subsystems().iter().filter(|id| !left.contains(id)).cloned());
    let arranged = s.reorder(&order)?;
    let rows = 1usize << left.len();
    let cols = 1usize << (s.num_subsystems() - left.len());
    let amps = arranged.amplitudes();
    let m = DMatrix::from_fn(rows, cols, |r, c| amps[r * cols + c]);
    let mut values: Vec<f64> = m.singular_values().iter().copied().collect();
    values.sort_by(|a, b| b.total_cmp(a));
    Ok(values)
}

/// True when the state factorizes across the cut (one nonzero coefficient).
pub fn is_product(s: &StateVector, left: &[SubsystemId]) -> Result<bool> {
    let coefficients = schmidt_coefficients(s, left)?;
    Ok(coefficients.iter().skip(1).all(|c| c.abs() <= SVD_TOL))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{bell_state, BellKind, Spin};
    use std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn bell_state_is_maximal() {
        let s = bell_state(BellKind::PsiPlus, 1, 4).unwrap();
        let c = schmidt_coefficients(&s, &[1.into()]).unwrap();
        assert!((c[0] - FRAC_1_SQRT_2).abs() < SVD_TOL);
        assert!((c[1] - FRAC_1_SQRT_2).abs() < SVD_TOL);
        assert!(!is_product(&s, &[1.into()]).unwrap());
    }

    #[test]
    fn product_state_has_one_coefficient() {
        let s = StateVector::ket([("1", Spin::Plus), ("4", Spin::Minus)]).unwrap();
        let c = schmidt_coefficients(&s, &[1.into()]).unwrap();
        assert!((c[0] - 1.0).abs() < SVD_TOL);
        assert!(c[1].abs() < SVD_TOL);
        assert!(is_product(&s, &["4".into()]).unwrap());
    }

    #[test]
    fn trivial_bipartitions_rejected() {
        let s = StateVector::ket([("1", Spin::Plus), ("4", Spin::Minus)]).unwrap();
        assert_eq!(schmidt_coefficients(&s, &[]).unwrap_err(), Error::TrivialBipartition);
        assert_eq!(
            schmidt_coefficients(&s, &[1.into(), 4.into()]).unwrap_err(),
            Error::TrivialBipartition
        );
    }
}
