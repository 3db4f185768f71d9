use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::qcore::Register;

use super::ScenarioError;

/// Setting values chosen for one run, keyed by setting name.
pub type Assignment = BTreeMap<String, String>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub name: String,
    pub agents: Vec<Agent>,
    pub registers: Vec<Register>,
    pub events: Vec<Event>,
    #[serde(default)]
    pub settings: Vec<Setting>,
    pub outcomes: Vec<OutcomeVariable>,
    pub timing: TimingProfile,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentRole {
    Friend,
    Superobserver,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Agent {
    pub name: String,
    pub role: AgentRole,
}

/// A binary (or finite) free choice made by `owner` at `site`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Setting {
    pub name: String,
    pub owner: String,
    pub site: String,
    pub values: Vec<String>,
}

/// An observed outcome. Several bindings are allowed when their guards are
/// mutually exclusive; exactly one must be realized under any assignment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeVariable {
    pub name: String,
    pub owner: String,
    pub bindings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimingProfile {
    pub signal_delay: i64,
}

/// `setting=value` condition under which an event happens.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Guard {
    pub setting: String,
    pub value: String,
}

impl Guard {
    pub fn new(setting: &str, value: &str) -> Self {
        Guard { setting: setting.to_string(), value: value.to_string() }
    }

    pub fn holds(&self, assignment: &Assignment) -> Option<bool> {
        assignment.get(&self.setting).map(|v| v == &self.value)
    }
}

impl TryFrom<String> for Guard {
    type Error = String;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        match s.split_once('=') {
            Some((k, v)) if !k.trim().is_empty() && !v.trim().is_empty() => Ok(Guard::new(k.trim(), v.trim())),
            _ => Err(format!("guard `{s}` is not of the form setting=value")),
        }
    }
}

impl From<Guard> for String {
    fn from(g: Guard) -> String {
        g.to_string()
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}={}", self.setting, self.value)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub id: String,
    pub time: i64,
    pub site: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub guard: Option<Guard>,
    #[serde(flatten)]
    pub kind: EventKind,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    Prepare {
        registers: Vec<String>,
        state: StateSpec,
    },
    FriendMeasure {
        agent: String,
        system: String,
        memory: String,
        basis: BasisSpec,
    },
    Undo {
        agent: String,
        target: String,
    },
    /// Another agent reads a friend's memory. With unitary copy semantics the
    /// record is CNOT-ed into `target`.
    Copy {
        agent: String,
        memory: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<String>,
    },
    SuperMeasure {
        agent: String,
        registers: Vec<String>,
        basis: BasisSpec,
    },
    Gate {
        agent: String,
        registers: Vec<String>,
        gate: GateSpec,
    },
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Prepare { .. } => "prepare",
            EventKind::FriendMeasure { .. } => "friend_measure",
            EventKind::Undo { .. } => "undo",
            EventKind::Copy { .. } => "copy",
            EventKind::SuperMeasure { .. } => "super_measure",
            EventKind::Gate { .. } => "gate",
        }
    }

    pub fn agent(&self) -> Option<&str> {
        match self {
            EventKind::Prepare { .. } => None,
            EventKind::FriendMeasure { agent, .. }
            | EventKind::Undo { agent, .. }
            | EventKind::Copy { agent, .. }
            | EventKind::SuperMeasure { agent, .. }
            | EventKind::Gate { agent, .. } => Some(agent),
        }
    }
}

/// Complex numbers in files are `[re, im]` pairs.
pub type ComplexPair = [f64; 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    /// One of the kets in [`crate::qcore::kets::named`].
    Named(String),
    Amplitudes(Vec<ComplexPair>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BasisSpec {
    /// `computational`, `plus_minus`, or `bell` (two registers).
    Named(String),
    Custom { labels: Vec<String>, kets: Vec<Vec<ComplexPair>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GateSpec {
    /// `H`, `X`, `Z`, `CNOT`, or `bell_rotation` (CNOT then H on the first register).
    Named(String),
    Matrix { label: String, matrix: Vec<Vec<ComplexPair>> },
}

impl Scenario {
    pub fn event(&self, id: &str) -> Option<&Event> {
        self.events.iter().find(|e| e.id == id)
    }

    pub fn event_index(&self, id: &str) -> Option<usize> {
        self.events.iter().position(|e| e.id == id)
    }

    pub fn variable(&self, name: &str) -> Option<&OutcomeVariable> {
        self.outcomes.iter().find(|v| v.name == name)
    }

    pub fn setting(&self, name: &str) -> Option<&Setting> {
        self.settings.iter().find(|s| s.name == name)
    }

    pub fn agent(&self, name: &str) -> Option<&Agent> {
        self.agents.iter().find(|a| a.name == name)
    }

    pub fn register(&self, label: &str) -> Option<&Register> {
        self.registers.iter().find(|r| r.label == label)
    }

    pub fn register_labels(&self) -> Vec<String> {
        self.registers.iter().map(|r| r.label.clone()).collect()
    }

    pub fn variable_names(&self) -> Vec<String> {
        self.outcomes.iter().map(|v| v.name.clone()).collect()
    }

    /// Every combination of setting values, in declaration order.
    pub fn all_assignments(&self) -> Vec<Assignment> {
        let mut out = vec![Assignment::new()];
        for s in &self.settings {
            let mut next = Vec::with_capacity(out.len() * s.values.len());
            for a in &out {
                for v in &s.values {
                    let mut b = a.clone();
                    b.insert(s.name.clone(), v.clone());
                    next.push(b);
                }
            }
            out = next;
        }
        out
    }

    /// Event ids in circuit order: by tick, ties broken by declaration order.
    pub fn circuit_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.events.len()).collect();
        idx.sort_by_key(|&i| (self.events[i].time, i));
        idx
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Scenario, ScenarioError> {
        serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let suffix = format!(" at line {} column {}", e.line(), e.column());
            let message = full.strip_suffix(&suffix).unwrap_or(&full).to_string();
            ScenarioError::Parse { line: e.line(), column: e.column(), message }
        })
    }
}

/// Parses `x=1,y=0` into an assignment. An empty string gives an empty map.
pub fn parse_assignment(text: &str) -> Result<Assignment, ScenarioError> {
    let mut out = Assignment::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let g = Guard::try_from(part.to_string()).map_err(ScenarioError::BadSettings)?;
        out.insert(g.setting, g.value);
    }
    Ok(out)
}

pub fn format_assignment(a: &Assignment) -> String {
    a.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn guard_round_trips_as_string() {
        let g: Guard = serde_json::from_str("\"x=1\"").unwrap();
        assert_eq!(g, Guard::new("x", "1"));
        assert_eq!(serde_json::to_string(&g).unwrap(), "\"x=1\"");
        assert!(serde_json::from_str::<Guard>("\"x\"").is_err());
    }

    #[test]
    fn event_kind_is_flattened() {
        let e: Event = serde_json::from_str(
            r#"{"id":"u","time":3,"site":"L","kind":"undo","agent":"Alice","target":"m"}"#,
        )
        .unwrap();
        assert_eq!(e.kind, EventKind::Undo { agent: "Alice".into(), target: "m".into() });
    }

    #[test]
    fn parse_settings_list() {
        let a = parse_assignment("x=1, y=0").unwrap();
        assert_eq!(format_assignment(&a), "x=1,y=0");
        assert!(parse_assignment("x").is_err());
        assert!(parse_assignment("").unwrap().is_empty());
    }
}
