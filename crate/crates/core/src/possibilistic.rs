//! Implications from exact-zero table entries, chained by breadth-first search.
//!
//! A zero `p(u=α, v=β) = 0` yields `u=α ⟹ v=¬β` and `v=β ⟹ u=¬α`. A positive
//! entry is a support fact; a chain from one of its literals to the negation
//! of the other is a Hardy-style contradiction.

use std::collections::{BTreeMap, VecDeque};
use std::fmt;

use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::qcore::{format_rational, Rational};
use crate::scenario::{format_assignment, Assignment, Behavior, CorrelationTable};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PossibilisticError {
    #[error("variable `{0}` is not binary")]
    NonBinary(String),
    #[error("table over ({0}) has entries that do not snap to exact rationals")]
    NotSnapped(String),
    #[error("expected a pairwise table, found {0} variables")]
    NotPairwise(usize),
    #[error("variable `{0}` appears with different outcome labels in different tables")]
    InconsistentLabels(String),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Literal {
    pub variable: String,
    pub value: String,
}

impl Literal {
    pub fn new(variable: &str, value: &str) -> Self {
        Literal { variable: variable.into(), value: value.into() }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.variable, self.value)
    }
}

/// The table entry `p(first, second | settings)` an edge or fact comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EntryRef {
    pub first: Literal,
    pub second: Literal,
    pub settings: Assignment,
}

impl fmt::Display for EntryRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.settings.is_empty() {
            write!(f, "p({}, {})", self.first, self.second)
        } else {
            write!(f, "p({}, {} | {})", self.first, self.second, format_assignment(&self.settings))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Edge {
    pub from: Literal,
    pub to: Literal,
    /// The zero entry this implication is read off.
    pub source: EntryRef,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SupportFact {
    pub entry: EntryRef,
    #[serde(serialize_with = "crate::fmt::serialize_rational")]
    pub probability: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ImplicationGraph {
    /// Outcome labels of each binary variable.
    pub variables: BTreeMap<String, [String; 2]>,
    /// Sorted by `(from, to)`.
    pub edges: Vec<Edge>,
    /// In table order, then entry order.
    pub support: Vec<SupportFact>,
}

impl ImplicationGraph {
    pub fn negate(&self, l: &Literal) -> Option<Literal> {
        let labels = self.variables.get(&l.variable)?;
        let other = if labels[0] == l.value { &labels[1] } else { &labels[0] };
        Some(Literal::new(&l.variable, other))
    }

    /// Edges reachable from `start`, with the chain to the first node in `targets`.
    fn bfs(&self, start: &Literal, targets: &[Literal]) -> Option<Vec<Edge>> {
        let mut parent: BTreeMap<&Literal, Option<usize>> = BTreeMap::new();
        parent.insert(start, None);
        let mut queue = VecDeque::from([start]);
        while let Some(node) = queue.pop_front() {
            if node != start && targets.contains(node) {
                let mut chain = Vec::new();
                let mut cur = node;
                while let Some(Some(i)) = parent.get(cur) {
                    chain.push(self.edges[*i].clone());
                    cur = &self.edges[*i].from;
                }
                chain.reverse();
                return Some(chain);
            }
            for (i, e) in self.edges.iter().enumerate().filter(|(_, e)| &e.from == node) {
                if !parent.contains_key(&e.to) {
                    parent.insert(&e.to, Some(i));
                    queue.push_back(&e.to);
                }
            }
        }
        None
    }

    /// A copy without the edges read off any entry of the `(u, v)` table.
    pub fn without_pair(&self, u: &str, v: &str) -> ImplicationGraph {
        let mut g = self.clone();
        g.edges.retain(|e| {
            let (a, b) = (&e.source.first.variable, &e.source.second.variable);
            !((a == u && b == v) || (a == v && b == u))
        });
        g
    }
}

/// Reads implications and support facts off pairwise, snapped, binary tables.
pub fn extract_implications(tables: &[CorrelationTable]) -> Result<ImplicationGraph, PossibilisticError> {
    let mut g = ImplicationGraph::default();
    let mut edges: BTreeMap<(Literal, Literal), Edge> = BTreeMap::new();
    for t in tables {
        if t.variables.len() != 2 {
            return Err(PossibilisticError::NotPairwise(t.variables.len()));
        }
        for (v, labels) in t.variables.iter().zip(&t.labels) {
            if labels.len() != 2 {
                return Err(PossibilisticError::NonBinary(v.clone()));
            }
            let pair = [labels[0].clone(), labels[1].clone()];
            match g.variables.get(v) {
                Some(existing) if existing != &pair => return Err(PossibilisticError::InconsistentLabels(v.clone())),
                _ => {
                    g.variables.insert(v.clone(), pair);
                }
            }
        }
        if !t.is_snapped() {
            return Err(PossibilisticError::NotSnapped(t.variables.join(",")));
        }
    }
    for t in tables {
        let (u, v) = (&t.variables[0], &t.variables[1]);
        for e in &t.entries {
            let first = Literal::new(u, &e.outcome[0]);
            let second = Literal::new(v, &e.outcome[1]);
            let entry = EntryRef { first: first.clone(), second: second.clone(), settings: t.settings.clone() };
            let p = e.exact.clone().expect("checked snapped");
            if p.is_zero() {
                let not_first = g.negate(&first).expect("binary");
                let not_second = g.negate(&second).expect("binary");
                for (from, to) in [(first.clone(), not_second), (second.clone(), not_first)] {
                    edges
                        .entry((from.clone(), to.clone()))
                        .or_insert(Edge { from, to, source: entry.clone() });
                }
            } else {
                g.support.push(SupportFact { entry, probability: p });
            }
        }
    }
    g.edges = edges.into_values().collect();
    Ok(g)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContradictionReport {
    pub chain: Vec<Edge>,
    pub support: SupportFact,
    /// One line per step, ending with the contradicted fact.
    pub derivation: Vec<String>,
}

impl ContradictionReport {
    /// `a=- ⇒ d=1 ⇒ c=0 ⇒ b=+`
    pub fn chain_text(&self) -> String {
        let mut parts = vec![self.chain[0].from.to_string()];
        parts.extend(self.chain.iter().map(|e| e.to.to_string()));
        parts.join(" ⇒ ")
    }

    /// Checks every edge against the given tables: its source entry must be an exact zero.
    pub fn replay(&self, tables: &[CorrelationTable]) -> bool {
        self.chain.iter().all(|e| {
            tables.iter().any(|t| {
                t.settings == e.source.settings
                    && t.variables == [e.source.first.variable.clone(), e.source.second.variable.clone()]
                    && t.exact(&[&e.source.first.value, &e.source.second.value]).is_some_and(Zero::is_zero)
            })
        })
    }

    /// Table with columns settings | prediction | implication.
    pub fn to_markdown(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("Chain: {}\n\n", self.chain_text()));
        out.push_str("| step | settings | prediction | implication |\n|---|---|---|---|\n");
        for (i, e) in self.chain.iter().enumerate() {
            out.push_str(&format!(
                "| {} | {} | {} = 0 | {} ⟹ {} |\n",
                i + 1,
                settings_cell(&e.source.settings),
                cell(&e.source),
                e.from,
                e.to
            ));
        }
        let last = &self.chain.last().expect("non-empty chain").to;
        out.push_str(&format!(
            "| {} | {} | {} = {} > 0 | contradicts {} |\n",
            self.chain.len() + 1,
            settings_cell(&self.support.entry.settings),
            cell(&self.support.entry),
            format_rational(&self.support.probability),
            last
        ));
        out
    }
}

/// Markdown cell text with `|` escaped.
fn cell(e: &EntryRef) -> String {
    e.to_string().replace('|', "\\|")
}

fn settings_cell(a: &Assignment) -> String {
    if a.is_empty() {
        "-".into()
    } else {
        format_assignment(a)
    }
}

/// First chain, over support facts in order, from one literal of a support
/// fact to the negation of one of its literals.
pub fn find_contradiction(g: &ImplicationGraph) -> Option<ContradictionReport> {
    for fact in &g.support {
        let (l1, l2) = (&fact.entry.first, &fact.entry.second);
        let (n1, n2) = (g.negate(l1)?, g.negate(l2)?);
        for (start, targets) in [(l1, [n2.clone(), n1.clone()]), (l2, [n1.clone(), n2.clone()])] {
            if let Some(chain) = g.bfs(start, &targets) {
                let mut derivation: Vec<String> = chain
                    .iter()
                    .map(|e| format!("{} = 0, so {} ⟹ {}", e.source, e.from, e.to))
                    .collect();
                derivation.push(format!(
                    "{} = {} > 0, but {} ⟹ {}",
                    fact.entry,
                    format_rational(&fact.probability),
                    start,
                    chain.last().expect("non-empty").to
                ));
                return Some(ContradictionReport { chain, support: fact.clone(), derivation });
            }
        }
    }
    None
}

/// Zero and support constraints on joint value assignments of binary variables.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct ValueConstraints {
    pub variables: Vec<(String, [String; 2])>,
    /// Each conjunction must never hold.
    pub zeros: Vec<Vec<Literal>>,
    /// Each conjunction must hold for some admitted assignment.
    pub supports: Vec<Vec<Literal>>,
}

impl ValueConstraints {
    pub fn unconstrained(variables: Vec<(String, [String; 2])>) -> Self {
        ValueConstraints { variables, ..Default::default() }
    }

    pub fn from_graph(g: &ImplicationGraph) -> Self {
        let mut zeros: Vec<Vec<Literal>> = Vec::new();
        for e in &g.edges {
            let z = vec![e.source.first.clone(), e.source.second.clone()];
            if !zeros.contains(&z) {
                zeros.push(z);
            }
        }
        ValueConstraints {
            variables: g.variables.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
            zeros,
            supports: g.support.iter().map(|f| vec![f.entry.first.clone(), f.entry.second.clone()]).collect(),
        }
    }

    pub fn from_tables(tables: &[CorrelationTable]) -> Result<Self, PossibilisticError> {
        Ok(Self::from_graph(&extract_implications(tables)?))
    }

    /// Variables `a0, a1, b0, b1`, one per party and setting.
    pub fn from_behavior(b: &Behavior) -> Self {
        Self::from_tables(&b.context_tables()).expect("behavior tables are binary and exact")
    }
}

/// A value for every variable, in `ValueConstraints::variables` order.
pub type ValueAssignment = Vec<Literal>;

/// Every assignment that avoids all zeros; empty if the admitted set fails to
/// witness some support fact.
pub fn enumerate_value_assignments(c: &ValueConstraints) -> Vec<ValueAssignment> {
    let n = c.variables.len();
    let mut admitted = Vec::new();
    for bits in 0..(1usize << n) {
        let assignment: ValueAssignment = c
            .variables
            .iter()
            .enumerate()
            .map(|(i, (name, labels))| Literal::new(name, &labels[(bits >> (n - 1 - i)) & 1]))
            .collect();
        let holds = |conj: &Vec<Literal>| conj.iter().all(|l| assignment.contains(l));
        if !c.zeros.iter().any(holds) {
            admitted.push(assignment);
        }
    }
    let witnessed = |conj: &Vec<Literal>| admitted.iter().any(|a| conj.iter().all(|l| a.contains(l)));
    if c.supports.iter().all(witnessed) {
        admitted
    } else {
        Vec::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{event_distribution, lookup};

    fn pm_tables() -> Vec<CorrelationTable> {
        let s = lookup("pusey_masanes_fr").unwrap();
        let a = Assignment::new();
        [("c", "d"), ("c", "b"), ("a", "d"), ("a", "b")]
            .iter()
            .map(|(u, v)| event_distribution(&s, &a, &[u, v]).unwrap())
            .collect()
    }

    #[test]
    fn pm_edges_and_chain() {
        let tables = pm_tables();
        let g = extract_implications(&tables).unwrap();
        let has = |f: (&str, &str), t: (&str, &str)| {
            g.edges.iter().any(|e| e.from == Literal::new(f.0, f.1) && e.to == Literal::new(t.0, t.1))
        };
        assert!(has(("d", "1"), ("c", "0")));
        assert!(has(("c", "0"), ("b", "+")));
        assert!(has(("a", "-"), ("d", "1")));
        let r = find_contradiction(&g).unwrap();
        assert_eq!(r.chain_text(), "a=- ⇒ d=1 ⇒ c=0 ⇒ b=+");
        assert_eq!(r.support.entry.second, Literal::new("b", "-"));
        assert!(r.replay(&tables));
    }

    #[test]
    fn dropping_cb_zeros_removes_chain() {
        let g = extract_implications(&pm_tables()).unwrap().without_pair("c", "b");
        assert!(find_contradiction(&g).is_none());
    }

    #[test]
    fn empty_graph_has_no_contradiction() {
        assert!(find_contradiction(&ImplicationGraph::default()).is_none());
    }

    #[test]
    fn unsnapped_table_rejected() {
        let mut t = pm_tables().remove(0);
        t.entries[0].exact = None;
        assert!(matches!(extract_implications(&[t]), Err(PossibilisticError::NotSnapped(_))));
    }

    #[test]
    fn enumeration_cases() {
        let vars = || -> Vec<(String, [String; 2])> {
            ["a0", "a1", "b0", "b1"].iter().map(|v| (v.to_string(), ["0".to_string(), "1".to_string()])).collect()
        };
        assert_eq!(enumerate_value_assignments(&ValueConstraints::unconstrained(vars())).len(), 16);
        assert!(enumerate_value_assignments(&ValueConstraints::from_behavior(&Behavior::hardy())).is_empty());
        let det = enumerate_value_assignments(&ValueConstraints::from_behavior(&Behavior::deterministic(1, 0, 0, 1)));
        assert_eq!(det.len(), 1);
        let vals: Vec<&str> = det[0].iter().map(|l| l.value.as_str()).collect();
        assert_eq!(vals, vec!["1", "0", "0", "1"]);
    }
}
