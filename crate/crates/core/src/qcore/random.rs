//! Seeded samplers for states and bases used by randomized checks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{DensityOperator, ProjectiveBasis, Register, C64};

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// Single-qubit density operator `G G† / Tr(G G†)` from a complex Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R, label: &str) -> DensityOperator {
    let g = DMatrix::from_fn(2, 2, |_, _| gaussian(rng));
    let m = &g * g.adjoint();
    let tr = m.trace();
    let mut rho = m / tr;
    // exact Hermitian symmetrization so construction never trips on rounding
    let h = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
    rho = h;
    DensityOperator::new(rho, vec![Register::system(label)]).expect("Ginibre state is a valid density operator")
}

/// Pure single-qubit state drawn uniformly from the Bloch sphere.
pub fn random_pure_density<R: Rng + ?Sized>(rng: &mut R, label: &str) -> DensityOperator {
    let k = bloch_ket(rng);
    let m = DMatrix::from_fn(2, 2, |i, j| k[i] * k[j].conj());
    DensityOperator::new(m, vec![Register::system(label)]).expect("pure state is a valid density operator")
}

fn bloch_ket<R: Rng + ?Sized>(rng: &mut R) -> [C64; 2] {
    let cos_t: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let half = cos_t.clamp(-1.0, 1.0).acos() / 2.0;
    [C64::new(half.cos(), 0.0), C64::from_polar(half.sin(), phi)]
}

/// Orthonormal qubit basis with its first ket uniform on the Bloch sphere.
pub fn random_basis<R: Rng + ?Sized>(rng: &mut R) -> ProjectiveBasis {
    let [a, b] = bloch_ket(rng);
    let k0 = vec![a, b];
    let k1 = vec![-b.conj(), a.conj()];
    ProjectiveBasis::new(vec![k0, k1], vec!["0".into(), "1".into()]).expect("constructed basis is orthonormal")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::QuantumState;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_valid_and_reproducible() {
        let mut r1 = ChaCha8Rng::seed_from_u64(7);
        let mut r2 = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let a = random_density(&mut r1, "S");
            let b = random_density(&mut r2, "S");
            assert_eq!(a, b);
            assert_eq!(a.labels(), vec!["S"]);
            random_basis(&mut r1);
            random_basis(&mut r2);
        }
    }
}
