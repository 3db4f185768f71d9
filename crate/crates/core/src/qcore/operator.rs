use nalgebra::{DMatrix, DVector};

use super::{check_disjoint, check_unique, qubit_count, QcoreError, C64, OPERATOR_TOL};

/// Maps a sub-register index to/from positions inside a larger register list.
pub(crate) struct Embedding {
    /// Bit offsets in the full index, one per operator register, most significant first.
    bits: Vec<usize>,
    mask: usize,
}

impl Embedding {
    pub(crate) fn new(sub: &[String], full: &[String]) -> Result<Self, QcoreError> {
        let n = full.len();
        let mut bits = Vec::with_capacity(sub.len());
        for label in sub {
            let pos = full
                .iter()
                .position(|f| f == label)
                .ok_or_else(|| QcoreError::UnknownRegister(label.clone()))?;
            bits.push(n - 1 - pos);
        }
        let mask = bits.iter().fold(0usize, |m, b| m | (1 << b));
        Ok(Embedding { bits, mask })
    }

    #[inline]
    pub(crate) fn extract(&self, index: usize) -> usize {
        let m = self.bits.len();
        self.bits
            .iter()
            .enumerate()
            .fold(0, |s, (k, &b)| s | (((index >> b) & 1) << (m - 1 - k)))
    }

    #[inline]
    pub(crate) fn deposit(&self, sub: usize) -> usize {
        let m = self.bits.len();
        self.bits
            .iter()
            .enumerate()
            .fold(0, |s, (k, &b)| s | (((sub >> (m - 1 - k)) & 1) << b))
    }

    #[inline]
    pub(crate) fn rest(&self, index: usize) -> usize {
        index & !self.mask
    }
}

/// A square operator on an ordered list of qubit registers.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: DMatrix<C64>,
    registers: Vec<String>,
}

impl Operator {
    pub fn new(matrix: DMatrix<C64>, registers: Vec<String>) -> Result<Self, QcoreError> {
        check_unique(&registers)?;
        if matrix.nrows() != matrix.ncols() {
            return Err(QcoreError::DimensionMismatch { expected: matrix.nrows(), found: matrix.ncols() });
        }
        let n = qubit_count(matrix.nrows())?;
        if n != registers.len() {
            return Err(QcoreError::DimensionMismatch { expected: 1 << registers.len(), found: matrix.nrows() });
        }
        Ok(Operator { matrix, registers })
    }

    pub fn identity(registers: Vec<String>) -> Result<Self, QcoreError> {
        let dim = 1usize << registers.len();
        Operator::new(DMatrix::identity(dim, dim), registers)
    }

    /// `|k⟩⟨k|` for a (not necessarily normalized) ket.
    pub fn projector(ket: &DVector<C64>, registers: Vec<String>) -> Result<Self, QcoreError> {
        Operator::new(ket * ket.adjoint(), registers)
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn registers(&self) -> &[String] {
        &self.registers
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Operator {
        Operator { matrix: self.matrix.adjoint(), registers: self.registers.clone() }
    }

    pub fn tensor(&self, other: &Operator) -> Result<Operator, QcoreError> {
        check_disjoint(&self.registers, &other.registers)?;
        let mut regs = self.registers.clone();
        regs.extend(other.registers.iter().cloned());
        Operator::new(self.matrix.kronecker(&other.matrix), regs)
    }

    /// `self · other`, after lifting both onto the union of their registers.
    pub fn compose(&self, other: &Operator) -> Result<Operator, QcoreError> {
        let mut regs = self.registers.clone();
        for r in &other.registers {
            if !regs.contains(r) {
                regs.push(r.clone());
            }
        }
        let a = self.embed(&regs)?;
        let b = other.embed(&regs)?;
        Operator::new(a * b, regs)
    }

    /// Full matrix on `full`, padding with identity on the remaining registers.
    pub fn embed(&self, full: &[String]) -> Result<DMatrix<C64>, QcoreError> {
        if full == self.registers.as_slice() {
            return Ok(self.matrix.clone());
        }
        let emb = Embedding::new(&self.registers, full)?;
        let dim = 1usize << full.len();
        let sub_dim = self.dim();
        let mut out = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            let si = emb.extract(i);
            let rest = emb.rest(i);
            for sj in 0..sub_dim {
                let v = self.matrix[(si, sj)];
                if v != C64::new(0.0, 0.0) {
                    out[(i, rest | emb.deposit(sj))] = v;
                }
            }
        }
        Ok(out)
    }

    /// Applies the operator to raw amplitudes laid out over `full`.
    pub(crate) fn apply_raw(&self, amps: &DVector<C64>, full: &[String]) -> Result<DVector<C64>, QcoreError> {
        let emb = Embedding::new(&self.registers, full)?;
        let dim = amps.len();
        let sub_dim = self.dim();
        let mut out = DVector::zeros(dim);
        for i in 0..dim {
            let si = emb.extract(i);
            let rest = emb.rest(i);
            let mut acc = C64::new(0.0, 0.0);
            for sj in 0..sub_dim {
                acc += self.matrix[(si, sj)] * amps[rest | emb.deposit(sj)];
            }
            out[i] = acc;
        }
        Ok(out)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        max_abs(&(&self.matrix - self.matrix.adjoint())) <= tol
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }
}

pub(crate) fn max_abs(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub(crate) fn hermitian_eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| a.total_cmp(b));
    vals
}

/// An operator with `U U† = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Unitary(Operator);

impl Unitary {
    pub fn new(op: Operator) -> Result<Self, QcoreError> {
        let dim = op.dim();
        let dev = max_abs(&(op.matrix() * op.matrix().adjoint() - DMatrix::identity(dim, dim)));
        if dev > OPERATOR_TOL {
            return Err(QcoreError::InvalidOperator { what: "unitary", deviation: dev });
        }
        Ok(Unitary(op))
    }

    pub fn from_matrix(matrix: DMatrix<C64>, registers: Vec<String>) -> Result<Self, QcoreError> {
        Unitary::new(Operator::new(matrix, registers)?)
    }

    pub fn adjoint(&self) -> Unitary {
        Unitary(self.0.adjoint())
    }

    pub fn compose(&self, other: &Unitary) -> Result<Unitary, QcoreError> {
        Ok(Unitary(self.0.compose(&other.0)?))
    }

    pub fn tensor(&self, other: &Unitary) -> Result<Unitary, QcoreError> {
        Ok(Unitary(self.0.tensor(&other.0)?))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.0.matrix()
    }

    pub fn registers(&self) -> &[String] {
        self.0.registers()
    }
}

/// A Hermitian operator with spectrum in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect(Operator);

impl Effect {
    pub fn new(op: Operator) -> Result<Self, QcoreError> {
        let herm = max_abs(&(op.matrix() - op.matrix().adjoint()));
        if herm > OPERATOR_TOL {
            return Err(QcoreError::InvalidOperator { what: "effect (hermiticity)", deviation: herm });
        }
        let eig = op.hermitian_eigenvalues();
        let lo = eig.first().copied().unwrap_or(0.0);
        let hi = eig.last().copied().unwrap_or(0.0);
        if lo < -OPERATOR_TOL {
            return Err(QcoreError::InvalidOperator { what: "effect (positivity)", deviation: -lo });
        }
        if hi > 1.0 + OPERATOR_TOL {
            return Err(QcoreError::InvalidOperator { what: "effect (E <= I)", deviation: hi - 1.0 });
        }
        Ok(Effect(op))
    }

    pub fn projector(ket: &DVector<C64>, registers: Vec<String>) -> Result<Self, QcoreError> {
        Effect::new(Operator::projector(ket, registers)?)
    }

    pub fn identity(registers: Vec<String>) -> Result<Self, QcoreError> {
        Effect::new(Operator::identity(registers)?)
    }

    pub fn tensor(&self, other: &Effect) -> Result<Effect, QcoreError> {
        Ok(Effect(self.0.tensor(&other.0)?))
    }

    pub fn operator(&self) -> &Operator {
        &self.0
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        self.0.matrix()
    }

    pub fn registers(&self) -> &[String] {
        self.0.registers()
    }
}

/// A map `V` from `input` registers into `output` registers with `V†V = I`.
#[derive(Debug, Clone, PartialEq)]
pub struct Isometry {
    matrix: DMatrix<C64>,
    input: Vec<String>,
    output: Vec<String>,
}

impl Isometry {
    pub fn new(matrix: DMatrix<C64>, input: Vec<String>, output: Vec<String>) -> Result<Self, QcoreError> {
        if matrix.nrows() != 1 << output.len() || matrix.ncols() != 1 << input.len() {
            return Err(QcoreError::DimensionMismatch { expected: 1 << output.len(), found: matrix.nrows() });
        }
        if matrix.nrows() < matrix.ncols() {
            return Err(QcoreError::DimensionMismatch { expected: matrix.ncols(), found: matrix.nrows() });
        }
        let k = matrix.ncols();
        let dev = max_abs(&(matrix.adjoint() * &matrix - DMatrix::identity(k, k)));
        if dev > OPERATOR_TOL {
            return Err(QcoreError::InvalidOperator { what: "isometry", deviation: dev });
        }
        Ok(Isometry { matrix, input, output })
    }

    /// `V = U (I ⊗ |0⟩_ancilla)`: feed the ancilla registers in their ready state.
    ///
    /// The unitary's registers must be `input` followed by the ancillas.
    pub fn from_unitary_with_ready(u: &Unitary, input: &[String]) -> Result<Self, QcoreError> {
        let regs = u.registers();
        if regs.len() < input.len() || &regs[..input.len()] != input {
            return Err(QcoreError::UnknownRegister(input.join(",")));
        }
        let anc = regs.len() - input.len();
        let cols: Vec<usize> = (0..1usize << input.len()).map(|c| c << anc).collect();
        let m = u.matrix().select_columns(cols.iter());
        Isometry::new(m, input.to_vec(), regs.to_vec())
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.matrix
    }

    pub fn input(&self) -> &[String] {
        &self.input
    }

    pub fn output(&self) -> &[String] {
        &self.output
    }

    /// `V X V†` for an operator on the input registers.
    pub fn push(&self, x: &DMatrix<C64>) -> DMatrix<C64> {
        &self.matrix * x * self.matrix.adjoint()
    }

    /// `V† Y V` for an operator on the output registers.
    pub fn pull(&self, y: &DMatrix<C64>) -> DMatrix<C64> {
        self.matrix.adjoint() * y * &self.matrix
    }
}
