use nalgebra::DMatrix;

use super::{ProjectiveBasis, QcoreError, Unitary, C64};

fn c(re: f64) -> C64 {
    C64::new(re, 0.0)
}

/// CNOT with `control` as the most significant register.
pub fn cnot(control: &str, target: &str) -> Unitary {
    let mut m = DMatrix::zeros(4, 4);
    m[(0, 0)] = c(1.0);
    m[(1, 1)] = c(1.0);
    m[(2, 3)] = c(1.0);
    m[(3, 2)] = c(1.0);
    Unitary::from_matrix(m, vec![control.to_string(), target.to_string()]).expect("CNOT is unitary")
}

pub fn hadamard(register: &str) -> Unitary {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let m = DMatrix::from_row_slice(2, 2, &[c(h), c(h), c(h), c(-h)]);
    Unitary::from_matrix(m, vec![register.to_string()]).expect("H is unitary")
}

pub fn single_qubit_unitary(matrix: DMatrix<C64>, register: &str) -> Result<Unitary, QcoreError> {
    if matrix.nrows() != 2 {
        return Err(QcoreError::NotSingleQubit(matrix.nrows()));
    }
    Unitary::from_matrix(matrix, vec![register.to_string()])
}

/// `(B ⊗ I)·CNOT·(B† ⊗ I)` on `[system, friend]`, where `B` rotates the
/// computational basis onto `basis`. The friend starts in `|0⟩` and ends in
/// `|k⟩` when the system is in the basis ket `k`.
pub fn measurement_dilation(basis: &ProjectiveBasis, system: &str, friend: &str) -> Result<Unitary, QcoreError> {
    let b = single_qubit_unitary(basis.change_of_basis(), system)?;
    b.compose(&cnot(system, friend))?.compose(&b.adjoint())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{kets, Register, StateVector};

    fn sf(amps: Vec<C64>) -> StateVector {
        StateVector::new(amps, vec![Register::system("S"), Register::memory("F", "friend")]).unwrap()
    }

    #[test]
    fn computational_dilation_is_cnot() {
        let u = measurement_dilation(&ProjectiveBasis::computational(), "S", "F").unwrap();
        let diff = u.matrix() - cnot("S", "F").matrix();
        assert!(diff.iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn records_one_on_friend() {
        let u = measurement_dilation(&ProjectiveBasis::computational(), "S", "F").unwrap();
        let out = StateVector::basis(&[1, 0], vec![Register::system("S"), Register::system("F")])
            .unwrap()
            .evolve(&u)
            .unwrap();
        assert!((out.amplitudes()[3].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn plus_minus_records_minus() {
        let u = measurement_dilation(&ProjectiveBasis::plus_minus(), "S", "F").unwrap();
        let minus_ready = StateVector::new(kets::minus(), vec![Register::system("S")])
            .unwrap()
            .tensor(&StateVector::new(kets::zero(), vec![Register::system("F")]).unwrap())
            .unwrap();
        let out = minus_ready.evolve(&u).unwrap();
        let want = StateVector::new(kets::minus(), vec![Register::system("S")])
            .unwrap()
            .tensor(&StateVector::new(kets::one(), vec![Register::system("F")]).unwrap())
            .unwrap();
        assert!(out.distance_up_to_phase(&want) < 1e-12);
    }

    #[test]
    fn plus_through_cnot_gives_phi_plus() {
        let u = cnot("S", "F");
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let out = sf(vec![c(h), c(0.0), c(h), c(0.0)]).evolve(&u).unwrap();
        let want = sf(kets::phi_plus());
        assert!(out.distance_up_to_phase(&want) < 1e-15);
    }

    #[test]
    fn dilation_rejects_wide_basis() {
        let r = single_qubit_unitary(DMatrix::identity(4, 4), "S");
        assert_eq!(r, Err(QcoreError::NotSingleQubit(4)));
    }
}
