use serde::Serialize;

use crate::qcore::{born_probability, kets, DensityOperator, Effect, Register};
use crate::scenario::{event_distribution_with, lookup, Assignment, CompileOptions, InputOverride};

use super::FeasibilityError;

/// Both friend readouts of the measure, undo, re-measure circuit, next to
/// `Tr(|0⟩⟨0| ρ)`, `Tr(|1⟩⟨1| ρ)` and `Tr(|±⟩⟨±| ρ)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GuerinReport {
    /// `p(f1=0), p(f1=1)` from the circuit.
    pub f1: [f64; 2],
    /// `p(f2=+), p(f2=-)` from the circuit.
    pub f2: [f64; 2],
    pub closed_f1: [f64; 2],
    pub closed_f2: [f64; 2],
    pub max_deviation: f64,
    /// Every deviation is within `MARGINAL_TOL`.
    pub holds: bool,
}

pub const MARGINAL_TOL: f64 = 1e-12;

/// Runs `guerin_modified` on input `ρ` for the system and compares marginals.
pub fn guerin_marginal_check(rho: &DensityOperator) -> Result<GuerinReport, FeasibilityError> {
    if rho.qubits() != 1 {
        return Err(FeasibilityError::NotQubit);
    }
    let rho = DensityOperator::new(rho.matrix().clone(), vec![Register::system("S")])?;
    let s = lookup("guerin_modified")?;
    let input = InputOverride(rho.clone());
    let none = Assignment::new();
    let t1 = event_distribution_with(&s, &none, &["f1"], CompileOptions::default(), Some(&input))?;
    let t2 = event_distribution_with(&s, &none, &["f2"], CompileOptions::default(), Some(&input))?;
    let circuit = |t: &crate::scenario::CorrelationTable, a: &str, b: &str| {
        [t.probability(&[a]).unwrap_or(f64::NAN), t.probability(&[b]).unwrap_or(f64::NAN)]
    };
    let f1 = circuit(&t1, "0", "1");
    let f2 = circuit(&t2, "+", "-");
    let trace = |ket: Vec<crate::qcore::C64>| -> Result<f64, FeasibilityError> {
        let e = Effect::projector(&nalgebra::DVector::from_vec(ket), vec!["S".into()])?;
        Ok(born_probability(&rho, &[e])?)
    };
    let closed_f1 = [trace(kets::zero())?, trace(kets::one())?];
    let closed_f2 = [trace(kets::plus())?, trace(kets::minus())?];
    let max_deviation = f1
        .iter()
        .zip(&closed_f1)
        .chain(f2.iter().zip(&closed_f2))
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(GuerinReport { f1, f2, closed_f1, closed_f2, max_deviation, holds: max_deviation <= MARGINAL_TOL })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::C64;
    use nalgebra::DMatrix;

    fn pure(ket: Vec<C64>) -> DensityOperator {
        let v = nalgebra::DVector::from_vec(ket);
        let m: DMatrix<C64> = &v * v.adjoint();
        DensityOperator::new(m, vec![Register::system("S")]).unwrap()
    }

    #[test]
    fn eigenstates_of_each_basis() {
        let r = guerin_marginal_check(&pure(kets::zero())).unwrap();
        assert!(r.holds);
        assert!((r.f1[0] - 1.0).abs() < 1e-12 && (r.f2[0] - 0.5).abs() < 1e-12);
        let r = guerin_marginal_check(&pure(kets::plus())).unwrap();
        assert!((r.f1[0] - 0.5).abs() < 1e-12 && (r.f2[0] - 1.0).abs() < 1e-12);
    }
}
