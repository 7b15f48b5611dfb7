use std::collections::HashSet;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Complex amplitude of one basis component.
pub type ComplexAmplitude = Complex64;

/// Largest number of two-level subsystems a dense state may hold.
pub const MAX_SUBSYSTEMS: usize = 12;

/// Tolerance for exact-algebra checks.
pub const EXACT_TOL: f64 = 1e-12;

/// Label of one two-level subsystem (a particle, an atom, a photon path).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SubsystemId(String);

impl SubsystemId {
    pub fn new(label: impl Into<String>) -> Self {
        SubsystemId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for SubsystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for SubsystemId {
    fn from(s: &str) -> Self {
        SubsystemId(s.to_owned())
    }
}

impl From<String> for SubsystemId {
    fn from(s: String) -> Self {
        SubsystemId(s)
    }
}

impl From<u32> for SubsystemId {
    fn from(n: u32) -> Self {
        SubsystemId(n.to_string())
    }
}

impl From<&SubsystemId> for SubsystemId {
    fn from(s: &SubsystemId) -> Self {
        s.clone()
    }
}

/// The two ẑ eigenstates of a subsystem. `Plus` is bit 0, `Minus` is bit 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    pub fn bit(self) -> usize {
        match self {
            Spin::Plus => 0,
            Spin::Minus => 1,
        }
    }

    pub fn from_bit(bit: usize) -> Self {
        if bit == 0 {
            Spin::Plus
        } else {
            Spin::Minus
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Spin::Plus => "+",
            Spin::Minus => "-",
        }
    }
}

/// Pure state of `n` two-level subsystems, stored densely over `2^n` basis
/// states.
///
/// Basis index bit `n - 1 - k` holds the outcome of subsystem `k`, so the
/// first listed subsystem is the most significant bit.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    subsystems: Vec<SubsystemId>,
    amplitudes: Vec<ComplexAmplitude>,
}

impl StateVector {
    /// Builds a state from raw amplitudes. The amplitudes are not normalized.
    pub fn new<I, S>(subsystems: I, amplitudes: Vec<ComplexAmplitude>) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<SubsystemId>,
    {
        let subsystems: Vec<SubsystemId> = subsystems.into_iter().map(Into::into).collect();
        check_subsystems(&subsystems)?;
        if amplitudes.len() != 1 << subsystems.len() {
            return Err(Error::InvalidAmplitudes(format!(
                "{} amplitudes for {} subsystems",
                amplitudes.len(),
                subsystems.len()
            )));
        }
        if amplitudes.iter().any(|a| !a.re.is_finite() || !a.im.is_finite()) {
            return Err(Error::InvalidAmplitudes("non-finite component".into()));
        }
        Ok(StateVector { subsystems, amplitudes })
    }

    /// The state with no subsystems: a single unit amplitude.
    pub fn empty() -> Self {
        StateVector {
            subsystems: Vec::new(),
            amplitudes: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Product basis ket, e.g. `ket([("1", Spin::Plus), ("2", Spin::Minus)])`.
    pub fn ket<I, S>(spins: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, Spin)>,
        S: Into<SubsystemId>,
    {
        let (ids, spins): (Vec<SubsystemId>, Vec<Spin>) = spins.into_iter().map(|(id, s)| (id.into(), s)).unzip();
        let index = spins.iter().fold(0usize, |acc, s| (acc << 1) | s.bit());
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << ids.len()];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        StateVector::new(ids, amplitudes)
    }

    /// Single-subsystem state `alpha|+⟩ + beta|−⟩`.
    pub fn qubit(id: impl Into<SubsystemId>, alpha: Complex64, beta: Complex64) -> Result<Self> {
        StateVector::new([id.into()], vec![alpha, beta])
    }

    pub fn subsystems(&self) -> &[SubsystemId] {
        &self.subsystems
    }

    pub fn amplitudes(&self) -> &[ComplexAmplitude] {
        &self.amplitudes
    }

    pub fn num_subsystems(&self) -> usize {
        self.subsystems.len()
    }

    pub fn position(&self, id: &SubsystemId) -> Option<usize> {
        self.subsystems.iter().position(|s| s == id)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Returns the state rescaled to unit norm.
    pub fn normalize(&self) -> Result<Self> {
        let n = self.norm_sqr().sqrt();
        if n <= f64::MIN_POSITIVE {
            return Err(Error::InvalidAmplitudes("zero vector cannot be normalized".into()));
        }
        Ok(self.scaled(Complex64::new(1.0 / n, 0.0)))
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        StateVector {
            subsystems: self.subsystems.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    /// Amplitude of the product ket given by `spins` in this state's order.
    pub fn amplitude_of(&self, spins: &[Spin]) -> Option<ComplexAmplitude> {
        if spins.len() != self.subsystems.len() {
            return None;
        }
        let index = spins.iter().fold(0usize, |acc, s| (acc << 1) | s.bit());
        Some(self.amplitudes[index])
    }

    /// Kronecker product; subsystem lists are concatenated.
    pub fn tensor(&self, other: &StateVector) -> Result<Self> {
        let mine: HashSet<&SubsystemId> = self.subsystems.iter().collect();
        if let Some(dup) = other.subsystems.iter().find(|s| mine.contains(s)) {
            return Err(Error::SubsystemCollision(dup.to_string()));
        }
        let mut subsystems = self.subsystems.clone();
        subsystems.extend(other.subsystems.iter().cloned());
        check_subsystems(&subsystems)?;
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Ok(StateVector { subsystems, amplitudes })
    }

    /// `⟨self|other⟩`, conjugate-linear in `self`.
    pub fn inner(&self, other: &StateVector) -> Result<ComplexAmplitude> {
        if self.subsystems != other.subsystems {
            return Err(Error::SubsystemMismatch {
                left: self.subsystems.iter().map(ToString::to_string).collect(),
                right: other.subsystems.iter().map(ToString::to_string).collect(),
            });
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// `|⟨self|other⟩|²` after bringing `other` into this state's subsystem
    /// order. Both states are assumed normalized.
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        let other = other.reorder(&self.subsystems)?;
        Ok(self.inner(&other)?.norm_sqr())
    }

    /// Same physical state with the subsystems listed in `new_order`.
    pub fn reorder<S>(&self, new_order: &[S]) -> Result<Self>
    where
        S: Clone + Into<SubsystemId>,
    {
        let new_order: Vec<SubsystemId> = new_order.iter().cloned().map(Into::into).collect();
        let n = self.subsystems.len();
        if new_order.len() != n {
            return Err(Error::NotAPermutation);
        }
        // perm[k] = old position of the subsystem now at position k
        let mut perm = Vec::with_capacity(n);
        for id in &new_order {
            perm.push(self.position(id).ok_or(Error::NotAPermutation)?);
        }
        let distinct: HashSet<usize> = perm.iter().copied().collect();
        if distinct.len() != n {
            return Err(Error::NotAPermutation);
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.amplitudes.len()];
        for (new_index, slot) in amplitudes.iter_mut().enumerate() {
            let mut old_index = 0usize;
            for (k, &old_pos) in perm.iter().enumerate() {
                let bit = (new_index >> (n - 1 - k)) & 1;
                old_index |= bit << (n - 1 - old_pos);
            }
            *slot = self.amplitudes[old_index];
        }
        Ok(StateVector {
            subsystems: new_order,
            amplitudes,
        })
    }

    /// Applies a 2×2 operator (row-major) to one subsystem.
    pub fn apply_single(&self, op: &[[Complex64; 2]; 2], target: &SubsystemId) -> Result<Self> {
        let k = self
            .position(target)
            .ok_or_else(|| Error::UnknownSubsystem(target.to_string()))?;
        let shift = self.subsystems.len() - 1 - k;
        let mask = 1usize << shift;
        let mut amplitudes = self.amplitudes.clone();
        for i in 0..self.amplitudes.len() {
            if i & mask != 0 {
                continue;
            }
            let a0 = self.amplitudes[i];
            let a1 = self.amplitudes[i | mask];
            amplitudes[i] = op[0][0] * a0 + op[0][1] * a1;
            amplitudes[i | mask] = op[1][0] * a0 + op[1][1] * a1;
        }
        Ok(StateVector {
            subsystems: self.subsystems.clone(),
            amplitudes,
        })
    }

    /// Partial inner product `(⟨v| ⊗ 1)|self⟩`: the unnormalized state of the
    /// subsystems not covered by `v`, in this state's order.
    pub fn project(&self, v: &StateVector) -> Result<Self> {
        let mut measured_pos = Vec::with_capacity(v.num_subsystems());
        for id in &v.subsystems {
            measured_pos.push(
                self.position(id)
                    .ok_or_else(|| Error::UnknownSubsystem(id.to_string()))?,
            );
        }
        let rest: Vec<SubsystemId> = self
            .subsystems
            .iter()
            .filter(|s| !v.subsystems.contains(s))
            .cloned()
            .collect();
        let mut order = v.subsystems.clone();
        order.extend(rest.iter().cloned());
        let arranged = self.reorder(&order)?;
        let rest_dim = 1usize << rest.len();
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); rest_dim];
        for (i, vi) in v.amplitudes.iter().enumerate() {
            let c = vi.conj();
            if c == Complex64::new(0.0, 0.0) {
                continue;
            }
            let row = &arranged.amplitudes[i * rest_dim..(i + 1) * rest_dim];
            for (slot, a) in amplitudes.iter_mut().zip(row) {
                *slot += c * a;
            }
        }
        Ok(StateVector {
            subsystems: rest,
            amplitudes,
        })
    }

    /// Componentwise sum; both states must list the same subsystems in the
    /// same order.
    pub fn add(&self, other: &StateVector) -> Result<Self> {
        if self.subsystems != other.subsystems {
            return Err(Error::SubsystemMismatch {
                left: self.subsystems.iter().map(ToString::to_string).collect(),
                right: other.subsystems.iter().map(ToString::to_string).collect(),
            });
        }
        Ok(StateVector {
            subsystems: self.subsystems.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a + b)
                .collect(),
        })
    }
}

fn check_subsystems(ids: &[SubsystemId]) -> Result<()> {
    if ids.len() > MAX_SUBSYSTEMS {
        return Err(Error::TooManySubsystems(ids.len()));
    }
    let mut seen = HashSet::with_capacity(ids.len());
    for id in ids {
        if !seen.insert(id) {
            return Err(Error::DuplicateSubsystem(id.to_string()));
        }
    }
    Ok(())
}

impl fmt::Display for StateVector {
    /// Lists the nonzero components as `amp|±±…⟩`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.subsystems.len();
        let mut first = true;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm_sqr() < 1e-24 {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            let ket: String = (0..n)
                .map(|k| Spin::from_bit((i >> (n - 1 - k)) & 1).symbol())
                .collect();
            write!(f, "({:.6}{:+.6}i)|{}⟩", a.re, a.im, ket)?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}
