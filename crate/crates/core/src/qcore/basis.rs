use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::operator::max_abs;
use super::{kets, QcoreError, C64, PROB_TOL};

/// An orthonormal basis of one qubit with an outcome label per ket.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectiveBasis {
    kets: Vec<DVector<C64>>,
    labels: Vec<String>,
}

/// Names of the bases understood by [`ProjectiveBasis::named`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedBasis {
    Computational,
    PlusMinus,
}

impl ProjectiveBasis {
    pub fn new(kets: Vec<Vec<C64>>, labels: Vec<String>) -> Result<Self, QcoreError> {
        if kets.len() != labels.len() {
            return Err(QcoreError::LabelCount { kets: kets.len(), labels: labels.len() });
        }
        let dim = kets.first().map(|k| k.len()).unwrap_or(0);
        if dim != 2 || kets.iter().any(|k| k.len() != dim) {
            return Err(QcoreError::NotSingleQubit(dim));
        }
        let kets: Vec<DVector<C64>> = kets.into_iter().map(DVector::from_vec).collect();
        let mut dev = 0.0f64;
        for (i, a) in kets.iter().enumerate() {
            for (j, b) in kets.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((a.dotc(b) - C64::new(want, 0.0)).norm());
            }
        }
        let sum = kets.iter().fold(DMatrix::zeros(dim, dim), |acc, k| acc + k * k.adjoint());
        dev = dev.max(max_abs(&(sum - DMatrix::identity(dim, dim))));
        if kets.len() != dim || dev > PROB_TOL {
            return Err(QcoreError::InvalidBasis(dev));
        }
        Ok(ProjectiveBasis { kets, labels })
    }

    pub fn computational() -> Self {
        ProjectiveBasis::new(vec![kets::zero(), kets::one()], vec!["0".into(), "1".into()])
            .expect("computational basis is orthonormal")
    }

    pub fn plus_minus() -> Self {
        ProjectiveBasis::new(vec![kets::plus(), kets::minus()], vec!["+".into(), "-".into()])
            .expect("± basis is orthonormal")
    }

    pub fn named(name: NamedBasis) -> Self {
        match name {
            NamedBasis::Computational => Self::computational(),
            NamedBasis::PlusMinus => Self::plus_minus(),
        }
    }

    /// Same kets, outcome labels permuted so that ket `i` carries label `1 - i`.
    pub fn relabeled_swapped(&self) -> Self {
        let mut labels = self.labels.clone();
        labels.reverse();
        let mut kets = self.kets.clone();
        kets.reverse();
        ProjectiveBasis { kets, labels }
    }

    pub fn kets(&self) -> &[DVector<C64>] {
        &self.kets
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.kets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kets.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn projector(&self, i: usize) -> DMatrix<C64> {
        &self.kets[i] * self.kets[i].adjoint()
    }

    /// Unitary `B` with `B|i⟩ = |b_i⟩`.
    pub fn change_of_basis(&self) -> DMatrix<C64> {
        DMatrix::from_columns(&self.kets)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_orthogonal() {
        let r = ProjectiveBasis::new(vec![kets::zero(), kets::plus()], vec!["a".into(), "b".into()]);
        assert!(matches!(r, Err(QcoreError::InvalidBasis(_))));
    }

    #[test]
    fn rejects_two_qubit_kets() {
        let r = ProjectiveBasis::new(vec![kets::phi_plus()], vec!["a".into()]);
        assert_eq!(r, Err(QcoreError::NotSingleQubit(4)));
    }

    #[test]
    fn plus_minus_labels() {
        let b = ProjectiveBasis::plus_minus();
        assert_eq!(b.labels(), &["+".to_string(), "-".to_string()]);
        assert_eq!(b.index_of("-"), Some(1));
    }
}
