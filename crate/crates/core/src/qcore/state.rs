use std::fmt;

use nalgebra::{DMatrix, DVector};

use super::operator::{hermitian_eigenvalues, max_abs, Operator, Unitary};
use super::{check_disjoint, check_unique, qubit_count, QcoreError, Register, C64, OPERATOR_TOL, PROB_TOL};

/// Anything a Born probability can be evaluated on.
pub trait QuantumState {
    fn registers(&self) -> &[Register];

    fn labels(&self) -> Vec<String> {
        self.registers().iter().map(|r| r.label.clone()).collect()
    }

    /// `Tr(X ρ)` for an operator already embedded on the full register list.
    fn expectation(&self, full: &DMatrix<C64>) -> C64;

    fn to_density(&self) -> DensityOperator;
}

fn check_registers(len: usize, registers: &[Register]) -> Result<(), QcoreError> {
    let n = qubit_count(len)?;
    if n != registers.len() {
        return Err(QcoreError::DimensionMismatch { expected: 1 << registers.len(), found: len });
    }
    let labels: Vec<String> = registers.iter().map(|r| r.label.clone()).collect();
    check_unique(&labels)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amplitudes: DVector<C64>,
    registers: Vec<Register>,
}

impl StateVector {
    pub fn new(amplitudes: Vec<C64>, registers: Vec<Register>) -> Result<Self, QcoreError> {
        check_registers(amplitudes.len(), &registers)?;
        let v = DVector::from_vec(amplitudes);
        let norm = v.norm_squared();
        if (norm - 1.0).abs() > PROB_TOL {
            return Err(QcoreError::NotNormalized(norm));
        }
        Ok(StateVector { amplitudes: v, registers })
    }

    /// `|bits⟩` with bits listed in register order.
    pub fn basis(bits: &[u8], registers: Vec<Register>) -> Result<Self, QcoreError> {
        if bits.len() != registers.len() {
            return Err(QcoreError::DimensionMismatch { expected: registers.len(), found: bits.len() });
        }
        let idx = bits.iter().fold(0usize, |acc, &b| (acc << 1) | (b & 1) as usize);
        let mut amps = vec![C64::new(0.0, 0.0); 1 << bits.len()];
        amps[idx] = C64::new(1.0, 0.0);
        StateVector::new(amps, registers)
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_parts(self) -> (DVector<C64>, Vec<Register>) {
        (self.amplitudes, self.registers)
    }

    pub fn qubits(&self) -> usize {
        self.registers.len()
    }

    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.norm_squared()
    }

    pub fn tensor(&self, other: &StateVector) -> Result<StateVector, QcoreError> {
        check_disjoint(&self.labels(), &other.labels())?;
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        if regs.len() > super::MAX_QUBITS {
            return Err(QcoreError::TooManyQubits(regs.len()));
        }
        Ok(StateVector { amplitudes: self.amplitudes.kronecker(&other.amplitudes), registers: regs })
    }

    /// Applies an operator acting on a subset of the registers.
    pub fn apply(&self, op: &Operator) -> Result<StateVector, QcoreError> {
        let amps = op.apply_raw(&self.amplitudes, &self.labels())?;
        Ok(StateVector { amplitudes: amps, registers: self.registers.clone() })
    }

    pub fn evolve(&self, u: &Unitary) -> Result<StateVector, QcoreError> {
        self.apply(u.operator())
    }

    /// `⟨self|other⟩`; register lists must match exactly.
    pub fn inner(&self, other: &StateVector) -> Result<C64, QcoreError> {
        if self.labels() != other.labels() {
            return Err(QcoreError::DimensionMismatch { expected: self.qubits(), found: other.qubits() });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// `max_i |ψ_i − φ_i|` ignoring a global phase chosen from the largest amplitude.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let (i, _) = self
            .amplitudes
            .iter()
            .enumerate()
            .fold((0, 0.0), |best, (i, a)| if a.norm() > best.1 { (i, a.norm()) } else { best });
        let phase = if other.amplitudes[i].norm() > 0.0 {
            self.amplitudes[i] / other.amplitudes[i]
        } else {
            C64::new(1.0, 0.0)
        };
        let phase = phase / phase.norm().max(f64::MIN_POSITIVE);
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b * phase).norm())
            .fold(0.0, f64::max)
    }
}

impl QuantumState for StateVector {
    fn registers(&self) -> &[Register] {
        &self.registers
    }

    fn expectation(&self, full: &DMatrix<C64>) -> C64 {
        self.amplitudes.dotc(&(full * &self.amplitudes))
    }

    fn to_density(&self) -> DensityOperator {
        DensityOperator {
            matrix: &self.amplitudes * self.amplitudes.adjoint(),
            registers: self.registers.clone(),
        }
    }
}

impl fmt::Display for StateVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.qubits();
        let mut first = true;
        for (i, a) in self.amplitudes.iter().enumerate() {
            if a.norm() < 1e-12 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            if a.im.abs() < 1e-12 {
                write!(f, "{:.6}", a.re)?;
            } else {
                write!(f, "({:.6}{:+.6}i)", a.re, a.im)?;
            }
            write!(f, "|")?;
            for k in 0..n {
                write!(f, "{}", (i >> (n - 1 - k)) & 1)?;
            }
            write!(f, "⟩")?;
        }
        if first {
            write!(f, "0")?;
        }
        let labels: Vec<&str> = self.registers.iter().map(|r| r.label.as_str()).collect();
        write!(f, "_{}", labels.join(""))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: DMatrix<C64>,
    registers: Vec<Register>,
}

impl DensityOperator {
    pub fn new(matrix: DMatrix<C64>, registers: Vec<Register>) -> Result<Self, QcoreError> {
        if matrix.nrows() != matrix.ncols() {
            return Err(QcoreError::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        check_registers(matrix.nrows(), &registers)?;
        let herm = max_abs(&(&matrix - matrix.adjoint()));
        if herm > PROB_TOL {
            return Err(QcoreError::InvalidOperator { what: "density operator (hermiticity)", deviation: herm });
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > PROB_TOL || tr.im.abs() > PROB_TOL {
            return Err(QcoreError::InvalidOperator { what: "density operator (unit trace)", deviation: (tr - 1.0).norm() });
        }
        let lo = hermitian_eigenvalues(&matrix).first().copied().unwrap_or(0.0);
        if lo < -OPERATOR_TOL {
            return Err(QcoreError::InvalidOperator { what: "density operator (positivity)", deviation: -lo });
        }
        Ok(DensityOperator { matrix, registers })
    }

    pub(crate) fn from_raw(matrix: DMatrix<C64>, registers: Vec<Register>) -> Self {
        DensityOperator { matrix, registers }
    }

    pub fn maximally_mixed(registers: Vec<Register>) -> Result<Self, QcoreError> {
        let dim = 1usize << registers.len();
        let m = DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
        DensityOperator::new(m, registers)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn qubits(&self) -> usize {
        self.registers.len()
    }

    pub fn trace(&self) -> C64 {
        self.matrix.trace()
    }

    pub fn tensor(&self, other: &DensityOperator) -> Result<DensityOperator, QcoreError> {
        check_disjoint(&self.labels(), &other.labels())?;
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        if regs.len() > super::MAX_QUBITS {
            return Err(QcoreError::TooManyQubits(regs.len()));
        }
        Ok(DensityOperator { matrix: self.matrix.kronecker(&other.matrix), registers: regs })
    }

    /// `X ρ X†` for an operator on a subset of the registers.
    pub fn conjugate(&self, op: &Operator) -> Result<DensityOperator, QcoreError> {
        let full = op.embed(&self.labels())?;
        Ok(DensityOperator { matrix: &full * &self.matrix * full.adjoint(), registers: self.registers.clone() })
    }

    pub fn evolve(&self, u: &Unitary) -> Result<DensityOperator, QcoreError> {
        self.conjugate(u.operator())
    }

    pub fn max_abs_diff(&self, other: &DensityOperator) -> f64 {
        max_abs(&(&self.matrix - &other.matrix))
    }
}

impl QuantumState for DensityOperator {
    fn registers(&self) -> &[Register] {
        &self.registers
    }

    fn expectation(&self, full: &DMatrix<C64>) -> C64 {
        (full * &self.matrix).trace()
    }

    fn to_density(&self) -> DensityOperator {
        self.clone()
    }
}

/// Single- and two-qubit kets used by the built-in scenarios, as raw amplitudes.
pub mod kets {
    use super::C64;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn re(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    pub fn zero() -> Vec<C64> {
        re(&[1.0, 0.0])
    }

    pub fn one() -> Vec<C64> {
        re(&[0.0, 1.0])
    }

    pub fn plus() -> Vec<C64> {
        re(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2])
    }

    pub fn minus() -> Vec<C64> {
        re(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2])
    }

    /// `(|00⟩ + |01⟩ + |10⟩)/√3`
    pub fn hardy() -> Vec<C64> {
        let s = 1.0 / 3f64.sqrt();
        re(&[s, s, s, 0.0])
    }

    /// `(|01⟩ − |10⟩)/√2`
    pub fn singlet() -> Vec<C64> {
        re(&[0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0])
    }

    /// `(|00⟩ + |11⟩)/√2`
    pub fn phi_plus() -> Vec<C64> {
        re(&[FRAC_1_SQRT_2, 0.0, 0.0, FRAC_1_SQRT_2])
    }

    /// Looks up a ket by name: zero, one, plus, minus, hardy, singlet, phi_plus.
    pub fn named(name: &str) -> Option<Vec<C64>> {
        Some(match name {
            "zero" | "0" => zero(),
            "one" | "1" => one(),
            "plus" | "+" => plus(),
            "minus" | "-" => minus(),
            "hardy" => hardy(),
            "singlet" => singlet(),
            "phi_plus" => phi_plus(),
            _ => return None,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regs(labels: &[&str]) -> Vec<Register> {
        labels.iter().map(|l| Register::system(l)).collect()
    }

    #[test]
    fn plus_tensor_ready() {
        let s = StateVector::new(kets::plus(), regs(&["S"])).unwrap();
        let f = StateVector::new(kets::zero(), regs(&["F"])).unwrap();
        let sf = s.tensor(&f).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let want = [h, 0.0, h, 0.0];
        for (a, w) in sf.amplitudes().iter().zip(want) {
            assert!((a.re - w).abs() < 1e-15 && a.im == 0.0);
        }
        assert_eq!(sf.labels(), vec!["S", "F"]);
    }

    #[test]
    fn tensor_rejects_shared_label() {
        let s = StateVector::new(kets::plus(), regs(&["S"])).unwrap();
        assert_eq!(s.tensor(&s), Err(QcoreError::RegisterCollision("S".into())));
    }

    #[test]
    fn hardy_with_ready_memories() {
        let rs = StateVector::new(kets::hardy(), regs(&["R", "S"])).unwrap();
        let c = StateVector::new(kets::zero(), regs(&["C"])).unwrap();
        let d = StateVector::new(kets::zero(), regs(&["D"])).unwrap();
        let all = rs.tensor(&c).unwrap().tensor(&d).unwrap();
        let s = 1.0 / 3f64.sqrt();
        for (i, a) in all.amplitudes().iter().enumerate() {
            let want = match i {
                0b0000 | 0b0100 | 0b1000 => s,
                _ => 0.0,
            };
            assert!((a.re - want).abs() < 1e-15, "index {i}");
        }
    }

    #[test]
    fn rejects_bad_norm_and_length() {
        assert!(matches!(
            StateVector::new(vec![C64::new(1.0, 0.0); 2], regs(&["S"])),
            Err(QcoreError::NotNormalized(_))
        ));
        assert!(matches!(
            StateVector::new(vec![C64::new(1.0, 0.0); 3], regs(&["S"])),
            Err(QcoreError::NotPowerOfTwo(3))
        ));
    }

    #[test]
    fn density_rejects_non_positive() {
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(1.5, 0.0), C64::new(-0.5, 0.0)]));
        assert!(DensityOperator::new(m, regs(&["S"])).is_err());
    }

    #[test]
    fn display_lists_kets_in_register_order() {
        let s = StateVector::basis(&[1, 0], regs(&["S", "F"])).unwrap();
        assert_eq!(s.to_string(), "1.000000|10⟩_SF");
    }
}
