use nalgebra::{DMatrix, DVector};

use crate::qcore::operator_tools::{embed_product, max_abs};
use crate::qcore::{
    cnot, hadamard, kets, single_qubit_unitary, Operator, ProjectiveBasis, Register, StateVector, Unitary, C64,
    OPERATOR_TOL, PROB_TOL,
};

use super::model::{Assignment, BasisSpec, ComplexPair, Event, EventKind, GateSpec, Scenario, StateSpec};
use super::ScenarioError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CopySemantics {
    /// A copy reads the friend's memory register in place.
    #[default]
    ClassicalRead,
    /// A copy is a CNOT from the memory into the copier's target register.
    Unitary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CompileOptions {
    pub copy: CopySemantics,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GateStep {
    pub label: String,
    pub unitary: Unitary,
}

/// Projective readout on some registers, one projector per outcome label.
#[derive(Debug, Clone, PartialEq)]
pub struct Readout {
    pub registers: Vec<String>,
    pub outcomes: Vec<(String, Operator)>,
}

impl Readout {
    pub fn labels(&self) -> Vec<String> {
        self.outcomes.iter().map(|(l, _)| l.clone()).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompiledEvent {
    pub id: String,
    /// Position in the scenario's declaration order.
    pub index: usize,
    pub time: i64,
    pub site: String,
    pub kind: &'static str,
    pub steps: Vec<GateStep>,
    pub readout: Option<Readout>,
}

/// Realized events of a scenario for one assignment, in circuit order.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub registers: Vec<Register>,
    pub assignment: Assignment,
    /// Prepared state of each prepare event: (register labels, amplitudes).
    pub preparations: Vec<(Vec<String>, Vec<C64>)>,
    pub events: Vec<CompiledEvent>,
}

impl Circuit {
    pub fn labels(&self) -> Vec<String> {
        self.registers.iter().map(|r| r.label.clone()).collect()
    }

    pub fn gate_labels(&self) -> Vec<String> {
        self.events.iter().flat_map(|e| e.steps.iter().map(|s| s.label.clone())).collect()
    }

    pub fn position(&self, id: &str) -> Option<usize> {
        self.events.iter().position(|e| e.id == id)
    }

    /// Product of all prepared states, unprepared registers in `|0⟩`.
    pub fn initial_state(&self) -> StateVector {
        let labels = self.labels();
        let mut groups: Vec<(Vec<String>, Vec<C64>)> = self.preparations.clone();
        for l in &labels {
            if !groups.iter().any(|(g, _)| g.contains(l)) {
                groups.push((vec![l.clone()], kets::zero()));
            }
        }
        let amps = embed_product(&groups, &labels).expect("preparations cover known registers");
        StateVector::new(amps.iter().copied().collect(), self.registers.clone())
            .expect("product of normalized states is normalized")
    }

    /// Runs every step without any projection.
    pub fn run_unitary(&self, input: &StateVector) -> Result<StateVector, ScenarioError> {
        let mut s = input.clone();
        for e in &self.events {
            for step in &e.steps {
                s = s.evolve(&step.unitary)?;
            }
        }
        Ok(s)
    }
}

pub fn compile(s: &Scenario, assignment: &Assignment) -> Result<Circuit, ScenarioError> {
    compile_with(s, assignment, CompileOptions::default())
}

pub(crate) fn check_assignment(s: &Scenario, assignment: &Assignment) -> Result<(), ScenarioError> {
    for (k, v) in assignment {
        let setting = s
            .setting(k)
            .ok_or_else(|| ScenarioError::BadSettings(format!("unknown setting `{k}`")))?;
        if !setting.values.contains(v) {
            return Err(ScenarioError::BadSettings(format!(
                "setting `{k}` has no value `{v}` (allowed: {})",
                setting.values.join(", ")
            )));
        }
    }
    Ok(())
}

pub(crate) fn is_realized(e: &Event, assignment: &Assignment) -> Result<bool, ScenarioError> {
    match &e.guard {
        None => Ok(true),
        Some(g) => g.holds(assignment).ok_or_else(|| ScenarioError::UnresolvedGuard {
            event: e.id.clone(),
            setting: g.setting.clone(),
        }),
    }
}

fn pair(p: &ComplexPair) -> C64 {
    C64::new(p[0], p[1])
}

fn bad(e: &Event, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::BadEvent { event: e.id.clone(), reason: reason.into() }
}

pub(crate) fn resolve_state(e: &Event, spec: &StateSpec, n: usize) -> Result<Vec<C64>, ScenarioError> {
    let amps = match spec {
        StateSpec::Named(name) => kets::named(name).ok_or_else(|| bad(e, format!("unknown state `{name}`")))?,
        StateSpec::Amplitudes(a) => a.iter().map(pair).collect(),
    };
    if amps.len() != 1 << n {
        return Err(bad(e, format!("state has {} amplitudes for {} registers", amps.len(), n)));
    }
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
    if (norm - 1.0).abs() > PROB_TOL {
        return Err(bad(e, format!("prepared state is not normalized: squared norm {norm}")));
    }
    Ok(amps)
}

pub(crate) fn resolve_single_basis(e: &Event, spec: &BasisSpec) -> Result<ProjectiveBasis, ScenarioError> {
    match spec {
        BasisSpec::Named(n) if n == "computational" => Ok(ProjectiveBasis::computational()),
        BasisSpec::Named(n) if n == "plus_minus" => Ok(ProjectiveBasis::plus_minus()),
        BasisSpec::Named(n) => Err(bad(e, format!("basis `{n}` is not a single-qubit basis"))),
        BasisSpec::Custom { labels, kets } => {
            let kets = kets.iter().map(|k| k.iter().map(pair).collect()).collect();
            ProjectiveBasis::new(kets, labels.clone()).map_err(|err| bad(e, err.to_string()))
        }
    }
}

/// Labels and kets of a measurement over `n` registers.
pub(crate) fn resolve_basis(e: &Event, spec: &BasisSpec, n: usize) -> Result<(Vec<String>, Vec<DVector<C64>>), ScenarioError> {
    if let BasisSpec::Named(name) = spec {
        if name == "bell" {
            if n != 2 {
                return Err(bad(e, "the bell basis needs exactly two registers"));
            }
            let h = std::f64::consts::FRAC_1_SQRT_2;
            let k = |v: [f64; 4]| DVector::from_iterator(4, v.iter().map(|&x| C64::new(x, 0.0)));
            return Ok((
                vec!["phi+".into(), "phi-".into(), "psi+".into(), "psi-".into()],
                vec![k([h, 0.0, 0.0, h]), k([h, 0.0, 0.0, -h]), k([0.0, h, h, 0.0]), k([0.0, h, -h, 0.0])],
            ));
        }
        if n != 1 {
            return Err(bad(e, format!("basis `{name}` acts on one register, event lists {n}")));
        }
        let b = resolve_single_basis(e, spec)?;
        return Ok((b.labels().to_vec(), b.kets().to_vec()));
    }
    let BasisSpec::Custom { labels, kets } = spec else { unreachable!() };
    let dim = 1usize << n;
    if kets.len() != dim || labels.len() != dim || kets.iter().any(|k| k.len() != dim) {
        return Err(bad(e, format!("custom basis must list {dim} kets of length {dim} with one label each")));
    }
    let kets: Vec<DVector<C64>> = kets.iter().map(|k| DVector::from_iterator(dim, k.iter().map(pair))).collect();
    let mut dev = 0.0f64;
    for (i, a) in kets.iter().enumerate() {
        for (j, b) in kets.iter().enumerate() {
            let want = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((a.dotc(b) - C64::new(want, 0.0)).norm());
        }
    }
    if dev > PROB_TOL {
        return Err(bad(e, format!("custom basis is not orthonormal (deviation {dev:e})")));
    }
    Ok((labels.clone(), kets))
}

fn readout_from(registers: Vec<String>, labels: Vec<String>, kets: &[DVector<C64>]) -> Result<Readout, ScenarioError> {
    let mut outcomes = Vec::with_capacity(labels.len());
    for (l, k) in labels.into_iter().zip(kets) {
        outcomes.push((l, Operator::projector(k, registers.clone())?));
    }
    Ok(Readout { registers, outcomes })
}

fn computational_readout(register: &str, labels: Vec<String>) -> Result<Readout, ScenarioError> {
    let kets = vec![DVector::from_vec(kets::zero()), DVector::from_vec(kets::one())];
    readout_from(vec![register.to_string()], labels, &kets)
}

/// Gate steps of a measurement dilation: `[CNOT]`, `[H, CNOT, H]`, or `[B†, CNOT, B]`.
fn dilation_steps(basis: &ProjectiveBasis, system: &str, memory: &str) -> Result<Vec<GateStep>, ScenarioError> {
    let b = basis.change_of_basis();
    let cx = GateStep { label: "CNOT".into(), unitary: cnot(system, memory) };
    if max_abs(&(&b - DMatrix::identity(2, 2))) < OPERATOR_TOL {
        return Ok(vec![cx]);
    }
    let h = hadamard(system);
    if max_abs(&(&b - h.matrix())) < OPERATOR_TOL {
        return Ok(vec![GateStep { label: "H".into(), unitary: h.clone() }, cx, GateStep { label: "H".into(), unitary: h }]);
    }
    let bu = single_qubit_unitary(b, system)?;
    Ok(vec![
        GateStep { label: "B†".into(), unitary: bu.adjoint() },
        cx,
        GateStep { label: "B".into(), unitary: bu },
    ])
}

fn adjoint_label(label: &str) -> String {
    match label {
        "H" | "X" | "Z" => label.to_string(),
        _ => match label.strip_suffix('†') {
            Some(l) => l.to_string(),
            None => format!("{label}†"),
        },
    }
}

fn gate_steps(e: &Event, registers: &[String], gate: &GateSpec) -> Result<Vec<GateStep>, ScenarioError> {
    let need = |n: usize| {
        if registers.len() == n {
            Ok(())
        } else {
            Err(bad(e, format!("gate needs {n} registers, event lists {}", registers.len())))
        }
    };
    let c = |re: f64| C64::new(re, 0.0);
    match gate {
        GateSpec::Named(name) => match name.as_str() {
            "H" => {
                need(1)?;
                Ok(vec![GateStep { label: "H".into(), unitary: hadamard(&registers[0]) }])
            }
            "X" | "Z" => {
                need(1)?;
                let m = if name == "X" {
                    DMatrix::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)])
                } else {
                    DMatrix::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)])
                };
                Ok(vec![GateStep { label: name.clone(), unitary: single_qubit_unitary(m, &registers[0])? }])
            }
            "CNOT" => {
                need(2)?;
                Ok(vec![GateStep { label: "CNOT".into(), unitary: cnot(&registers[0], &registers[1]) }])
            }
            "bell_rotation" => {
                need(2)?;
                Ok(vec![
                    GateStep { label: "CNOT".into(), unitary: cnot(&registers[0], &registers[1]) },
                    GateStep { label: "H".into(), unitary: hadamard(&registers[0]) },
                ])
            }
            other => Err(bad(e, format!("unknown gate `{other}`"))),
        },
        GateSpec::Matrix { label, matrix } => {
            let dim = 1usize << registers.len();
            if matrix.len() != dim || matrix.iter().any(|r| r.len() != dim) {
                return Err(bad(e, format!("gate matrix must be {dim}x{dim}")));
            }
            let m = DMatrix::from_fn(dim, dim, |i, j| pair(&matrix[i][j]));
            let u = Unitary::from_matrix(m, registers.to_vec()).map_err(|err| bad(e, err.to_string()))?;
            Ok(vec![GateStep { label: label.clone(), unitary: u }])
        }
    }
}

pub fn compile_with(s: &Scenario, assignment: &Assignment, opts: CompileOptions) -> Result<Circuit, ScenarioError> {
    check_assignment(s, assignment)?;
    let known = s.register_labels();
    let check_reg = |r: &String| {
        if known.contains(r) {
            Ok(())
        } else {
            Err(ScenarioError::UnknownRegister(r.clone()))
        }
    };
    let mut realized = Vec::new();
    for i in s.circuit_order() {
        if is_realized(&s.events[i], assignment)? {
            realized.push(i);
        }
    }

    let mut preparations = Vec::new();
    let mut touched: Vec<String> = Vec::new();
    let mut compiled: Vec<CompiledEvent> = Vec::new();
    // memory label -> (measure event id, labels) of the latest realized friend measurement
    let mut last_record: Vec<(String, String, Vec<String>)> = Vec::new();

    for &i in &realized {
        let e = &s.events[i];
        let mut steps = Vec::new();
        let mut readout = None;
        match &e.kind {
            EventKind::Prepare { registers, state } => {
                registers.iter().try_for_each(check_reg)?;
                if let Some(r) = registers.iter().find(|r| touched.contains(r)) {
                    return Err(bad(e, format!("register `{r}` is prepared after it was used")));
                }
                let amps = resolve_state(e, state, registers.len())?;
                touched.extend(registers.iter().cloned());
                preparations.push((registers.clone(), amps));
            }
            EventKind::FriendMeasure { system, memory, basis, .. } => {
                check_reg(system)?;
                check_reg(memory)?;
                let b = resolve_single_basis(e, basis)?;
                steps = dilation_steps(&b, system, memory)?;
                readout = Some(computational_readout(memory, b.labels().to_vec())?);
                last_record.retain(|(m, _, _)| m != memory);
                last_record.push((memory.clone(), e.id.clone(), b.labels().to_vec()));
                touched.extend([system.clone(), memory.clone()]);
            }
            EventKind::Undo { target, .. } => {
                let t = s.event(target).ok_or_else(|| ScenarioError::BadUndo {
                    undo: e.id.clone(),
                    target: target.clone(),
                    reason: "no such event".into(),
                })?;
                let EventKind::FriendMeasure { memory, .. } = &t.kind else {
                    return Err(ScenarioError::BadUndo {
                        undo: e.id.clone(),
                        target: target.clone(),
                        reason: format!("target is a {} event, not a friend measurement", t.kind.name()),
                    });
                };
                let Some(pos) = compiled.iter().position(|c| &c.id == target) else {
                    return Err(ScenarioError::BadUndo {
                        undo: e.id.clone(),
                        target: target.clone(),
                        reason: "target is not realized before the undo".into(),
                    });
                };
                if let Some(by) = compiled[pos + 1..].iter().find(|c| {
                    c.kind == "friend_measure"
                        && matches!(&s.events[c.index].kind, EventKind::FriendMeasure { memory: m, .. } if m == memory)
                }) {
                    return Err(ScenarioError::MemoryReused {
                        undo: e.id.clone(),
                        target: target.clone(),
                        memory: memory.clone(),
                        by: by.id.clone(),
                    });
                }
                steps = compiled[pos]
                    .steps
                    .iter()
                    .rev()
                    .map(|st| GateStep { label: adjoint_label(&st.label), unitary: st.unitary.adjoint() })
                    .collect();
            }
            EventKind::Copy { memory, target, .. } => {
                check_reg(memory)?;
                let labels = last_record
                    .iter()
                    .find(|(m, _, _)| m == memory)
                    .map(|(_, _, l)| l.clone())
                    .unwrap_or_else(|| vec!["0".into(), "1".into()]);
                match opts.copy {
                    CopySemantics::ClassicalRead => readout = Some(computational_readout(memory, labels)?),
                    CopySemantics::Unitary => {
                        let t = target.as_ref().ok_or_else(|| ScenarioError::CopyWithoutTarget(e.id.clone()))?;
                        check_reg(t)?;
                        steps = vec![GateStep { label: "CNOT".into(), unitary: cnot(memory, t) }];
                        readout = Some(computational_readout(t, labels)?);
                        touched.push(t.clone());
                    }
                }
                touched.push(memory.clone());
            }
            EventKind::SuperMeasure { registers, basis, .. } => {
                registers.iter().try_for_each(check_reg)?;
                let (labels, kets) = resolve_basis(e, basis, registers.len())?;
                readout = Some(readout_from(registers.clone(), labels, &kets)?);
                touched.extend(registers.iter().cloned());
            }
            EventKind::Gate { registers, gate, .. } => {
                registers.iter().try_for_each(check_reg)?;
                steps = gate_steps(e, registers, gate)?;
                touched.extend(registers.iter().cloned());
            }
        }
        compiled.push(CompiledEvent {
            id: e.id.clone(),
            index: i,
            time: e.time,
            site: e.site.clone(),
            kind: e.kind.name(),
            steps,
            readout,
        });
    }

    Ok(Circuit { registers: s.registers.clone(), assignment: assignment.clone(), preparations, events: compiled })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{lookup, parse_assignment};

    #[test]
    fn enemy_is_cnot_then_inverse() {
        let s = lookup("wigner_enemy").unwrap();
        let c = compile(&s, &Assignment::new()).unwrap();
        assert_eq!(c.gate_labels(), vec!["CNOT", "CNOT†"]);
        let psi = c.initial_state();
        let out = c.run_unitary(&psi).unwrap();
        assert!(out.distance_up_to_phase(&psi) < 1e-12);
    }

    #[test]
    fn guerin_modified_gate_sequence() {
        let s = lookup("guerin_modified").unwrap();
        let c = compile(&s, &Assignment::new()).unwrap();
        assert_eq!(c.gate_labels(), vec!["CNOT", "CNOT†", "H", "CNOT", "H"]);
    }

    #[test]
    fn lf_both_undos_then_plus_minus() {
        let s = lookup("brukner_lf").unwrap();
        let c = compile(&s, &parse_assignment("x=1,y=1").unwrap()).unwrap();
        let kinds: Vec<&str> = c.events.iter().map(|e| e.kind).collect();
        assert_eq!(kinds, vec!["prepare", "friend_measure", "friend_measure", "undo", "super_measure", "undo", "super_measure"]);
        let last = c.events.last().unwrap().readout.as_ref().unwrap();
        assert_eq!(last.labels(), vec!["+", "-"]);
    }

    #[test]
    fn missing_guard_value_is_error() {
        let s = lookup("brukner_lf").unwrap();
        assert!(matches!(
            compile(&s, &parse_assignment("x=1").unwrap()),
            Err(ScenarioError::UnresolvedGuard { .. })
        ));
        assert!(matches!(compile(&s, &parse_assignment("x=3,y=0").unwrap()), Err(ScenarioError::BadSettings(_))));
    }

    #[test]
    fn undo_after_memory_reuse_is_error() {
        let mut s = lookup("wigner_enemy").unwrap();
        let mut again = s.events.iter().find(|e| e.kind.name() == "friend_measure").unwrap().clone();
        again.id = "remeasure".into();
        let undo_time = s.events.iter().find(|e| e.kind.name() == "undo").unwrap().time;
        again.time = undo_time - 1;
        s.events.push(again);
        assert!(matches!(compile(&s, &Assignment::new()), Err(ScenarioError::MemoryReused { .. })));
    }
}
