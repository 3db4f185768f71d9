//! Dense complex linear algebra over small labelled qubit registers.
//!
//! Every object carries the ordered list of register labels it acts on. The
//! first register is the most significant bit of the computational-basis
//! index, so `|ab⟩` on registers `[R, S]` lives at index `2a + b`.

mod basis;
mod gates;
mod operator;
mod ops;
pub mod random;
mod snap;
mod state;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use basis::{NamedBasis, ProjectiveBasis};
pub use gates::{cnot, hadamard, measurement_dilation, single_qubit_unitary};
pub use operator::{Effect, Isometry, Operator, Unitary};
pub(crate) use ops::clamp_probability;
pub use ops::{born_probability, isometry_equivalence_check, partial_trace};
pub use snap::{format_rational, parse_rational, rational_to_f64, snap_probability, Rational, SNAP_MAX_DENOMINATOR, SNAP_TOL};
pub use state::{kets, DensityOperator, QuantumState, StateVector};

pub type C64 = num_complex::Complex64;

/// Tolerance for operator identities (unitarity, hermiticity, completeness).
pub const OPERATOR_TOL: f64 = 1e-10;
/// Tolerance for scalar probabilities and state norms.
pub const PROB_TOL: f64 = 1e-12;
/// Largest register count handled by the dense representation.
pub const MAX_QUBITS: usize = 6;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RegisterRole {
    System,
    Memory,
}

/// A labelled qubit. Memory registers hold a friend's coarse-grained record.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Register {
    pub label: String,
    pub role: RegisterRole,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub owner: Option<String>,
}

impl Register {
    pub fn system(label: &str) -> Self {
        Register { label: label.to_string(), role: RegisterRole::System, owner: None }
    }

    pub fn memory(label: &str, owner: &str) -> Self {
        Register {
            label: label.to_string(),
            role: RegisterRole::Memory,
            owner: Some(owner.to_string()),
        }
    }

    pub fn owned_system(label: &str, owner: &str) -> Self {
        Register {
            label: label.to_string(),
            role: RegisterRole::System,
            owner: Some(owner.to_string()),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QcoreError {
    #[error("register label `{0}` appears on both sides of a tensor product")]
    RegisterCollision(String),
    #[error("register `{0}` is not part of this state")]
    UnknownRegister(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("length {0} is not a power of two matching the register count")]
    NotPowerOfTwo(usize),
    #[error("state is not normalized: squared norm {0}")]
    NotNormalized(f64),
    #[error("{what} violates its defining identity (deviation {deviation:e})")]
    InvalidOperator { what: &'static str, deviation: f64 },
    #[error("basis is not orthonormal and complete (deviation {0:e})")]
    InvalidBasis(f64),
    #[error("expected a single-qubit basis, found dimension {0}")]
    NotSingleQubit(usize),
    #[error("at most {MAX_QUBITS} qubits are supported, requested {0}")]
    TooManyQubits(usize),
    #[error("partial trace needs at least one register to keep")]
    EmptyKeepSet,
    #[error("basis has {kets} kets but {labels} labels")]
    LabelCount { kets: usize, labels: usize },
}

pub(crate) fn qubit_count(len: usize) -> Result<usize, QcoreError> {
    if len == 0 || !len.is_power_of_two() {
        return Err(QcoreError::NotPowerOfTwo(len));
    }
    let n = len.trailing_zeros() as usize;
    if n > MAX_QUBITS {
        return Err(QcoreError::TooManyQubits(n));
    }
    Ok(n)
}

pub(crate) fn check_disjoint(a: &[String], b: &[String]) -> Result<(), QcoreError> {
    match a.iter().find(|l| b.contains(l)) {
        Some(l) => Err(QcoreError::RegisterCollision(l.clone())),
        None => Ok(()),
    }
}

pub(crate) fn check_unique(labels: &[String]) -> Result<(), QcoreError> {
    for (i, l) in labels.iter().enumerate() {
        if labels[..i].contains(l) {
            return Err(QcoreError::RegisterCollision(l.clone()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qubit_count_bounds() {
        assert_eq!(qubit_count(16), Ok(4));
        assert_eq!(qubit_count(0), Err(QcoreError::NotPowerOfTwo(0)));
        assert_eq!(qubit_count(128), Err(QcoreError::TooManyQubits(7)));
    }
}

/// Index plumbing shared with the scenario simulator.
pub(crate) mod operator_tools {
    use nalgebra::{DMatrix, DVector};

    pub(crate) use super::operator::{max_abs, Embedding};
    use super::{QcoreError, C64};

    /// Amplitudes of a product of kets on disjoint register groups, laid out over `full`.
    pub(crate) fn embed_product(groups: &[(Vec<String>, Vec<C64>)], full: &[String]) -> Result<DVector<C64>, QcoreError> {
        let embs: Vec<Embedding> = groups.iter().map(|(g, _)| Embedding::new(g, full)).collect::<Result<_, _>>()?;
        let dim = 1usize << full.len();
        Ok(DVector::from_fn(dim, |i, _| {
            embs.iter().zip(groups).fold(C64::new(1.0, 0.0), |acc, (e, (_, a))| acc * a[e.extract(i)])
        }))
    }

    /// Density matrix of a product of operators on disjoint register groups.
    pub(crate) fn embed_product_density(
        groups: &[(Vec<String>, DMatrix<C64>)],
        full: &[String],
    ) -> Result<DMatrix<C64>, QcoreError> {
        let embs: Vec<Embedding> = groups.iter().map(|(g, _)| Embedding::new(g, full)).collect::<Result<_, _>>()?;
        let dim = 1usize << full.len();
        Ok(DMatrix::from_fn(dim, dim, |i, j| {
            embs.iter()
                .zip(groups)
                .fold(C64::new(1.0, 0.0), |acc, (e, (_, m))| acc * m[(e.extract(i), e.extract(j))])
        }))
    }
}
