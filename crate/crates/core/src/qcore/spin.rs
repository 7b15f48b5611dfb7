use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::basis::MeasurementBasis;
use super::state::{StateVector, SubsystemId, EXACT_TOL};
use crate::error::{Error, Result};

/// Unit 3-vector giving a spin measurement direction. `|+⟩`/`|−⟩` are the ẑ
/// eigenstates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 3]", into = "[f64; 3]")]
pub struct MeasurementAxis([f64; 3]);

impl MeasurementAxis {
    pub fn new(x: f64, y: f64, z: f64) -> Result<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || (norm - 1.0).abs() > EXACT_TOL {
            return Err(Error::InvalidAxis(norm));
        }
        Ok(MeasurementAxis([x, y, z]))
    }

    /// Direction with polar angle `theta` from ẑ and azimuth `phi` from x̂.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        MeasurementAxis([theta.sin() * phi.cos(), theta.sin() * phi.sin(), theta.cos()])
    }

    /// Direction in the x–z plane at `angle` from ẑ towards x̂ (negative
    /// angles point towards −x̂).
    pub fn in_xz_plane(angle: f64) -> Self {
        MeasurementAxis([angle.sin(), 0.0, angle.cos()])
    }

    pub fn z() -> Self {
        MeasurementAxis([0.0, 0.0, 1.0])
    }

    pub fn x() -> Self {
        MeasurementAxis([1.0, 0.0, 0.0])
    }

    pub fn components(&self) -> [f64; 3] {
        self.0
    }

    /// `σ⃗·n̂` as a row-major 2×2 matrix.
    pub fn pauli(&self) -> [[Complex64; 2]; 2] {
        let [x, y, z] = self.0;
        [
            [Complex64::new(z, 0.0), Complex64::new(x, -y)],
            [Complex64::new(x, y), Complex64::new(-z, 0.0)],
        ]
    }

    /// Eigenbasis of `σ⃗·n̂` on one subsystem, labels `+` and `-`.
    pub fn basis(&self, id: impl Into<SubsystemId>) -> Result<MeasurementBasis> {
        let id = id.into();
        let [x, y, z] = self.0;
        let theta = z.clamp(-1.0, 1.0).acos();
        let phi = y.atan2(x);
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        let e = Complex64::from_polar(1.0, phi);
        let up = StateVector::qubit(id.clone(), Complex64::new(c, 0.0), e * s)?;
        let down = StateVector::qubit(id.clone(), Complex64::new(s, 0.0), -e * c)?;
        MeasurementBasis::new(&[id], vec![("+".into(), up), ("-".into(), down)])
    }
}

impl TryFrom<[f64; 3]> for MeasurementAxis {
    type Error = Error;

    fn try_from(v: [f64; 3]) -> Result<Self> {
        MeasurementAxis::new(v[0], v[1], v[2])
    }
}

impl From<MeasurementAxis> for [f64; 3] {
    fn from(a: MeasurementAxis) -> Self {
        a.0
    }
}

/// `⟨(σ⃗·a)ᵢ ⊗ (σ⃗·b)ⱼ⟩` on a normalized state.
pub fn spin_correlation(
    s: &StateVector,
    i: &SubsystemId,
    a: &MeasurementAxis,
    j: &SubsystemId,
    b: &MeasurementAxis,
) -> Result<f64> {
    if i == j {
        return Err(Error::IdenticalSubsystems(i.to_string()));
    }
    let acted = s.apply_single(&a.pauli(), i)?.apply_single(&b.pauli(), j)?;
    Ok(s.inner(&acted)?.re)
}
