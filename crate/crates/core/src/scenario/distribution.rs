use nalgebra::{DMatrix, DVector};
use num_traits::Zero;
use serde::Serialize;

use crate::qcore::operator_tools::embed_product_density;
use crate::qcore::{kets, snap_probability, DensityOperator, Operator, QuantumState, Rational, C64};

use super::access::{classify_accessibility, Accessibility};
use super::compile::{check_assignment, compile_with, is_realized, Circuit, CompileOptions};
use super::model::{format_assignment, Assignment, Scenario};
use super::ScenarioError;

/// Replaces the prepared state of some registers by a density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct InputOverride(pub DensityOperator);

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableEntry {
    pub outcome: Vec<String>,
    pub probability: f64,
    /// Rational value when the probability snaps.
    #[serde(serialize_with = "crate::fmt::serialize_opt_rational")]
    pub exact: Option<Rational>,
}

/// Joint outcome probabilities of some variables under one setting assignment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTable {
    pub variables: Vec<String>,
    pub labels: Vec<Vec<String>>,
    pub settings: Assignment,
    /// Lexicographic in variable order, labels in basis order.
    pub entries: Vec<TableEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub accessibility: Option<Accessibility>,
}

impl CorrelationTable {
    fn entry(&self, outcome: &[&str]) -> Option<&TableEntry> {
        self.entries
            .iter()
            .find(|e| e.outcome.len() == outcome.len() && e.outcome.iter().zip(outcome).all(|(a, b)| a == b))
    }

    pub fn probability(&self, outcome: &[&str]) -> Option<f64> {
        self.entry(outcome).map(|e| e.probability)
    }

    pub fn exact(&self, outcome: &[&str]) -> Option<&Rational> {
        self.entry(outcome).and_then(|e| e.exact.as_ref())
    }

    pub fn is_snapped(&self) -> bool {
        self.entries.iter().all(|e| e.exact.is_some())
    }

    pub fn total(&self) -> f64 {
        self.entries.iter().map(|e| e.probability).sum()
    }

    pub fn variable_index(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v == name)
    }

    /// Sums out every variable not in `keep`; `keep` fixes the new order.
    pub fn marginal(&self, keep: &[&str]) -> Result<CorrelationTable, ScenarioError> {
        let idx: Vec<usize> = keep
            .iter()
            .map(|k| self.variable_index(k).ok_or_else(|| ScenarioError::UnknownVariable(k.to_string())))
            .collect::<Result<_, _>>()?;
        let labels: Vec<Vec<String>> = idx.iter().map(|&i| self.labels[i].clone()).collect();
        let mut entries: Vec<TableEntry> = outcome_grid(&labels)
            .into_iter()
            .map(|outcome| TableEntry { outcome, probability: 0.0, exact: Some(Rational::zero()) })
            .collect();
        for e in &self.entries {
            let pos = mixed_radix(&idx.iter().map(|&i| self.labels[i].iter().position(|l| l == &e.outcome[i]).unwrap()).collect::<Vec<_>>(), &labels);
            let t = &mut entries[pos];
            t.probability += e.probability;
            t.exact = match (t.exact.take(), &e.exact) {
                (Some(a), Some(b)) => Some(a + b),
                _ => None,
            };
        }
        for t in &mut entries {
            if t.exact.is_none() {
                t.exact = snap_probability(t.probability);
            }
        }
        Ok(CorrelationTable {
            variables: keep.iter().map(|s| s.to_string()).collect(),
            labels,
            settings: self.settings.clone(),
            entries,
            accessibility: None,
        })
    }
}

fn outcome_grid(labels: &[Vec<String>]) -> Vec<Vec<String>> {
    let mut out = vec![Vec::new()];
    for ls in labels {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                ls.iter().map(move |l| {
                    let mut p = prefix.clone();
                    p.push(l.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn mixed_radix(choice: &[usize], labels: &[Vec<String>]) -> usize {
    choice.iter().zip(labels).fold(0, |acc, (&c, ls)| acc * ls.len() + c)
}

/// The event a variable is bound to under `assignment`.
pub fn realized_binding(s: &Scenario, assignment: &Assignment, variable: &str) -> Result<String, ScenarioError> {
    let v = s.variable(variable).ok_or_else(|| ScenarioError::UnknownVariable(variable.to_string()))?;
    let mut found = None;
    for b in &v.bindings {
        let e = s.event(b).ok_or_else(|| ScenarioError::UnknownEvent(b.clone()))?;
        if is_realized(e, assignment)? {
            if found.is_some() {
                return Err(ScenarioError::AmbiguousBinding(variable.to_string()));
            }
            found = Some(b.clone());
        }
    }
    found.ok_or_else(|| ScenarioError::Unrealized {
        variable: variable.to_string(),
        settings: format_assignment(assignment),
    })
}

#[derive(Clone)]
enum Sim {
    Pure(DVector<C64>),
    Mixed(DMatrix<C64>),
}

impl Sim {
    fn apply(&self, op: &Operator, labels: &[String]) -> Result<Sim, ScenarioError> {
        Ok(match self {
            Sim::Pure(v) => Sim::Pure(op.apply_raw(v, labels)?),
            Sim::Mixed(m) => {
                let full = op.embed(labels)?;
                Sim::Mixed(&full * m * full.adjoint())
            }
        })
    }

    fn weight(&self) -> f64 {
        match self {
            Sim::Pure(v) => v.norm_squared(),
            Sim::Mixed(m) => m.trace().re,
        }
    }
}

fn initial_sim(c: &Circuit, input: Option<&InputOverride>) -> Result<Sim, ScenarioError> {
    let labels = c.labels();
    let Some(InputOverride(rho)) = input else {
        return Ok(Sim::Pure(c.initial_state().amplitudes().clone()));
    };
    let over = rho.labels();
    let mut groups: Vec<(Vec<String>, DMatrix<C64>)> = vec![(over.clone(), rho.matrix().clone())];
    for (regs, amps) in &c.preparations {
        let hit = regs.iter().filter(|r| over.contains(r)).count();
        if hit == 0 {
            let v = DVector::from_vec(amps.clone());
            groups.push((regs.clone(), &v * v.adjoint()));
        } else if hit != regs.len() {
            return Err(ScenarioError::InvalidParameter(format!(
                "input override on {} splits the prepared group {}",
                over.join(","),
                regs.join(",")
            )));
        }
    }
    for l in &labels {
        if !groups.iter().any(|(g, _)| g.contains(l)) {
            let z = DVector::from_vec(kets::zero());
            groups.push((vec![l.clone()], &z * z.adjoint()));
        }
    }
    Ok(Sim::Mixed(embed_product_density(&groups, &labels)?))
}

struct Walker<'a> {
    circuit: &'a Circuit,
    labels: Vec<String>,
    /// For each circuit position, the slot of the selected variable bound there.
    slot_at: Vec<Option<usize>>,
    choice: Vec<usize>,
    out: Vec<(Vec<usize>, f64)>,
}

impl Walker<'_> {
    fn walk(&mut self, mut sim: Sim, from: usize) -> Result<(), ScenarioError> {
        for pos in from..self.circuit.events.len() {
            let ev = &self.circuit.events[pos];
            for step in &ev.steps {
                sim = sim.apply(step.unitary.operator(), &self.labels)?;
            }
            if let Some(slot) = self.slot_at[pos] {
                let readout = ev.readout.as_ref().expect("bound events have a readout");
                for (k, (_, proj)) in readout.outcomes.iter().enumerate() {
                    let branch = sim.apply(proj, &self.labels)?;
                    self.choice[slot] = k;
                    self.walk(branch, pos + 1)?;
                }
                return Ok(());
            }
        }
        self.out.push((self.choice.clone(), sim.weight()));
        Ok(())
    }
}

pub fn event_distribution(s: &Scenario, assignment: &Assignment, variables: &[&str]) -> Result<CorrelationTable, ScenarioError> {
    event_distribution_with(s, assignment, variables, CompileOptions::default(), None)
}

/// Two-time joint table of `variables` with explicit compile options and an
/// optional replacement of a prepared state.
pub fn event_distribution_with(
    s: &Scenario,
    assignment: &Assignment,
    variables: &[&str],
    opts: CompileOptions,
    input: Option<&InputOverride>,
) -> Result<CorrelationTable, ScenarioError> {
    check_assignment(s, assignment)?;
    for (i, v) in variables.iter().enumerate() {
        if variables[..i].contains(v) {
            return Err(ScenarioError::InvalidParameter(format!("variable `{v}` listed twice")));
        }
    }
    let bindings: Vec<String> =
        variables.iter().map(|v| realized_binding(s, assignment, v)).collect::<Result<_, _>>()?;
    let circuit = compile_with(s, assignment, opts)?;
    let mut slot_at = vec![None; circuit.events.len()];
    let mut labels = Vec::with_capacity(variables.len());
    for (slot, b) in bindings.iter().enumerate() {
        let pos = circuit.position(b).ok_or_else(|| ScenarioError::UnknownEvent(b.clone()))?;
        let readout = circuit.events[pos].readout.as_ref().ok_or_else(|| ScenarioError::BadEvent {
            event: b.clone(),
            reason: format!("variable `{}` is bound to an event without a readout", variables[slot]),
        })?;
        if slot_at[pos].is_some() {
            return Err(ScenarioError::InvalidParameter(format!("two variables share event `{b}`")));
        }
        slot_at[pos] = Some(slot);
        labels.push(readout.labels());
    }
    let sim = initial_sim(&circuit, input)?;
    let mut walker = Walker {
        circuit: &circuit,
        labels: circuit.labels(),
        slot_at,
        choice: vec![0; variables.len()],
        out: Vec::new(),
    };
    walker.walk(sim, 0)?;
    let mut probs = vec![0.0; labels.iter().map(|l| l.len()).product()];
    for (choice, p) in walker.out {
        probs[mixed_radix(&choice, &labels)] += p;
    }
    let entries = outcome_grid(&labels)
        .into_iter()
        .zip(probs)
        .map(|(outcome, p)| {
            let p = crate::qcore::clamp_probability(p);
            TableEntry { outcome, probability: p, exact: snap_probability(p) }
        })
        .collect();
    let accessibility = if variables.len() == 2 {
        classify_accessibility(s, assignment, variables[0], variables[1]).ok()
    } else {
        None
    };
    Ok(CorrelationTable {
        variables: variables.iter().map(|v| v.to_string()).collect(),
        labels,
        settings: assignment.clone(),
        entries,
        accessibility,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{lookup, parse_assignment};

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn pm_table_three_entries() {
        let s = lookup("pusey_masanes_fr").unwrap();
        let a = Assignment::new();
        let cd = event_distribution(&s, &a, &["c", "d"]).unwrap();
        assert_eq!(cd.exact(&["1", "1"]), Some(&r(0, 1)));
        let cb = event_distribution(&s, &a, &["c", "b"]).unwrap();
        assert_eq!(cb.exact(&["0", "-"]), Some(&r(0, 1)));
        let ad = event_distribution(&s, &a, &["a", "d"]).unwrap();
        assert_eq!(ad.exact(&["-", "0"]), Some(&r(0, 1)));
        let ab = event_distribution(&s, &a, &["a", "b"]).unwrap();
        assert_eq!(ab.exact(&["-", "-"]), Some(&r(1, 12)));
    }

    #[test]
    fn hardy_no_friends() {
        let s = lookup("hardy").unwrap();
        let t = event_distribution(&s, &parse_assignment("x=0,y=0").unwrap(), &["a", "b"]).unwrap();
        assert_eq!(t.exact(&["1", "1"]), Some(&r(0, 1)));
        assert_eq!(t.exact(&["0", "0"]), Some(&r(1, 3)));
    }

    #[test]
    fn marginal_of_later_variable_matches() {
        let s = lookup("pusey_masanes_fr").unwrap();
        let a = Assignment::new();
        let full = event_distribution(&s, &a, &["c", "b"]).unwrap();
        let alone = event_distribution(&s, &a, &["c"]).unwrap();
        let m = full.marginal(&["c"]).unwrap();
        for (x, y) in m.entries.iter().zip(&alone.entries) {
            assert!((x.probability - y.probability).abs() < 1e-12);
        }
    }

    #[test]
    fn unrealized_variable_is_an_error_not_zero() {
        let s = lookup("brukner_lf").unwrap();
        let s2 = {
            let mut s2 = s.clone();
            s2.outcomes.iter_mut().find(|v| v.name == "a").unwrap().bindings.truncate(1);
            s2
        };
        let e = event_distribution(&s2, &parse_assignment("x=1,y=1").unwrap(), &["a"]);
        assert!(matches!(e, Err(ScenarioError::Unrealized { .. })));
    }
}
