use nalgebra::DMatrix;

use super::operator::Embedding;
use super::{
    measurement_dilation, DensityOperator, Effect, Isometry, Operator, ProjectiveBasis, QcoreError, QuantumState,
    Register, C64, OPERATOR_TOL,
};

/// `Tr(E ρ)` for the product of `effects`, each padded with identity.
///
/// Values within `OPERATOR_TOL` of `[0, 1]` are clamped into it.
pub fn born_probability<S: QuantumState + ?Sized>(state: &S, effects: &[Effect]) -> Result<f64, QcoreError> {
    let labels = state.labels();
    let dim = 1usize << labels.len();
    let mut full = DMatrix::<C64>::identity(dim, dim);
    for e in effects {
        full = e.operator().embed(&labels)? * full;
    }
    let p = state.expectation(&full).re;
    Ok(clamp_probability(p))
}

pub(crate) fn clamp_probability(p: f64) -> f64 {
    if (-OPERATOR_TOL..0.0).contains(&p) {
        0.0
    } else if p > 1.0 && p <= 1.0 + OPERATOR_TOL {
        1.0
    } else {
        p
    }
}

/// Reduced state on `keep`, in the state's own register order.
pub fn partial_trace(rho: &DensityOperator, keep: &[&str]) -> Result<DensityOperator, QcoreError> {
    if keep.is_empty() {
        return Err(QcoreError::EmptyKeepSet);
    }
    let labels = rho.labels();
    for k in keep {
        if !labels.iter().any(|l| l == k) {
            return Err(QcoreError::UnknownRegister(k.to_string()));
        }
    }
    let kept: Vec<String> = labels.iter().filter(|l| keep.contains(&l.as_str())).cloned().collect();
    let traced: Vec<String> = labels.iter().filter(|l| !keep.contains(&l.as_str())).cloned().collect();
    let ek = Embedding::new(&kept, &labels)?;
    let et = Embedding::new(&traced, &labels)?;
    let kd = 1usize << kept.len();
    let td = 1usize << traced.len();
    let m = rho.matrix();
    let mut out = DMatrix::<C64>::zeros(kd, kd);
    for i in 0..kd {
        for j in 0..kd {
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..td {
                acc += m[(ek.deposit(i) | et.deposit(t), ek.deposit(j) | et.deposit(t))];
            }
            out[(i, j)] = acc;
        }
    }
    let regs: Vec<Register> = rho.registers().iter().filter(|r| kept.contains(&r.label)).cloned().collect();
    Ok(DensityOperator::from_raw(out, regs))
}

/// Largest `|Tr(V Π_k V† · U(ρ⊗|0⟩⟨0|)U†) − Tr(Π_k ρ)|` over the outcomes of `basis`.
///
/// The left side runs the full dilation on system plus a fresh friend qubit and
/// measures the pushed-forward projector; the right side is the direct Born rule.
pub fn isometry_equivalence_check(rho_s: &DensityOperator, basis: &ProjectiveBasis) -> Result<f64, QcoreError> {
    if rho_s.qubits() != 1 {
        return Err(QcoreError::NotSingleQubit(1 << rho_s.qubits()));
    }
    let sys = rho_s.registers()[0].label.clone();
    let friend = if sys == "F" { "F'".to_string() } else { "F".to_string() };
    let u = measurement_dilation(basis, &sys, &friend)?;
    let v = Isometry::from_unitary_with_ready(&u, std::slice::from_ref(&sys))?;
    let ready = DensityOperator::from_raw(
        DMatrix::from_row_slice(2, 2, &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)]),
        vec![Register::memory(&friend, "friend")],
    );
    let rho_sf = rho_s.tensor(&ready)?.evolve(&u)?;
    let mut worst = 0.0f64;
    for k in 0..basis.len() {
        let pi = basis.projector(k);
        let pushed = Operator::new(v.push(&pi), vec![sys.clone(), friend.clone()])?;
        let lhs = rho_sf.expectation(&pushed.embed(&rho_sf.labels())?).re;
        let rhs = rho_s.expectation(&pi).re;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{cnot, kets, StateVector};

    fn one(label: &str, amps: Vec<C64>) -> StateVector {
        StateVector::new(amps, vec![Register::system(label)]).unwrap()
    }

    #[test]
    fn plus_projector_on_zero_is_half() {
        let e = Effect::projector(&nalgebra::DVector::from_vec(kets::plus()), vec!["S".into()]).unwrap();
        let p = born_probability(&one("S", kets::zero()), &[e]).unwrap();
        assert!((p - 0.5).abs() < 1e-15);
    }

    #[test]
    fn friend_always_sees_phi_plus() {
        let state = one("S", kets::plus()).tensor(&one("F", kets::zero())).unwrap().evolve(&cnot("S", "F")).unwrap();
        let e = Effect::projector(&nalgebra::DVector::from_vec(kets::phi_plus()), vec!["S".into(), "F".into()]).unwrap();
        assert!((born_probability(&state, &[e]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn hardy_minus_minus_is_one_twelfth() {
        let psi = StateVector::new(kets::hardy(), vec![Register::system("A"), Register::system("B")]).unwrap();
        let m = nalgebra::DVector::from_vec(kets::minus());
        let ea = Effect::projector(&m, vec!["A".into()]).unwrap();
        let eb = Effect::projector(&m, vec!["B".into()]).unwrap();
        let p = born_probability(&psi, &[ea, eb]).unwrap();
        assert!((p - 1.0 / 12.0).abs() < 1e-12);
    }

    #[test]
    fn singlet_reduces_to_maximally_mixed() {
        let psi = StateVector::new(kets::singlet(), vec![Register::system("R"), Register::system("S")]).unwrap();
        let r = partial_trace(&psi.to_density(), &["R"]).unwrap();
        let want = DensityOperator::maximally_mixed(vec![Register::system("R")]).unwrap();
        assert!(r.max_abs_diff(&want) < 1e-15);
    }

    #[test]
    fn product_keeps_second_factor() {
        let psi = one("A", kets::zero()).tensor(&one("B", kets::one())).unwrap();
        let r = partial_trace(&psi.to_density(), &["B"]).unwrap();
        assert!((r.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
        assert_eq!(r.labels(), vec!["B"]);
    }

    #[test]
    fn empty_keep_is_error() {
        let psi = one("A", kets::zero());
        assert_eq!(partial_trace(&psi.to_density(), &[]), Err(QcoreError::EmptyKeepSet));
    }

    #[test]
    fn isometry_check_plus_state() {
        let rho = one("S", kets::plus()).to_density();
        assert!(isometry_equivalence_check(&rho, &ProjectiveBasis::plus_minus()).unwrap() < 1e-15);
        let mixed = DensityOperator::maximally_mixed(vec![Register::system("S")]).unwrap();
        assert!(isometry_equivalence_check(&mixed, &ProjectiveBasis::computational()).unwrap() < 1e-15);
    }
}
