use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::EpistemicError;

/// Per agent, the agents and registers they treat as quantum systems.
///
/// JSON form: `{"Alice": ["Charlie"], "Bob": ["Charlie", "Debbie"], ...}`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CutTable(BTreeMap<String, BTreeSet<String>>);

impl CutTable {
    pub fn new(entries: BTreeMap<String, BTreeSet<String>>) -> Result<Self, EpistemicError> {
        for (agent, quantum) in &entries {
            if quantum.contains(agent) {
                return Err(EpistemicError::SelfQuantum(agent.clone()));
            }
        }
        Ok(CutTable(entries))
    }

    pub fn from_pairs(pairs: &[(&str, &[&str])]) -> Result<Self, EpistemicError> {
        Self::new(
            pairs
                .iter()
                .map(|(a, q)| (a.to_string(), q.iter().map(|x| x.to_string()).collect()))
                .collect(),
        )
    }

    /// Alice: Charlie; Bob: Charlie, Debbie; Charlie: Debbie; Debbie: no one.
    pub fn frauchiger_renner() -> Self {
        Self::from_pairs(&[
            ("Alice", &["Charlie"]),
            ("Bob", &["Charlie", "Debbie"]),
            ("Charlie", &["Debbie"]),
            ("Debbie", &[]),
        ])
        .expect("no agent is quantum to itself")
    }

    pub fn from_json(text: &str) -> Result<Self, EpistemicError> {
        let raw: CutTable = serde_json::from_str(text).map_err(|e| EpistemicError::Parse(e.to_string()))?;
        Self::new(raw.0)
    }

    pub fn agents(&self) -> impl Iterator<Item = &str> {
        self.0.keys().map(String::as_str)
    }

    pub fn quantum(&self, agent: &str) -> Option<&BTreeSet<String>> {
        self.0.get(agent)
    }

    /// Unlisted agents see everything classically; an agent is always classical to itself.
    pub fn is_classical(&self, viewer: &str, other: &str) -> bool {
        self.0.get(viewer).is_none_or(|q| !q.contains(other))
    }

    pub fn covers(&self, agents: &[String]) -> Result<(), EpistemicError> {
        match agents.iter().find(|a| !self.0.contains_key(*a)) {
            Some(a) => Err(EpistemicError::MissingAgent(a.clone())),
            None => Ok(()),
        }
    }

    /// A copy in which `viewer` also treats `other` as quantum.
    pub fn with_quantum(&self, viewer: &str, other: &str) -> Result<Self, EpistemicError> {
        let mut entries = self.0.clone();
        entries.entry(viewer.to_string()).or_default().insert(other.to_string());
        Self::new(entries)
    }

    /// Every table obtained by moving one more agent to one viewer's quantum side.
    pub fn single_mutations(&self, agents: &[String]) -> Vec<(String, String, CutTable)> {
        let mut out = Vec::new();
        for viewer in agents {
            for other in agents {
                if viewer != other && self.is_classical(viewer, other) {
                    let t = self.with_quantum(viewer, other).expect("viewer differs from other");
                    out.push((viewer.clone(), other.clone(), t));
                }
            }
        }
        out
    }
}

impl fmt::Display for CutTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "| agent | views as quantum |")?;
        writeln!(f, "|---|---|")?;
        for (agent, q) in &self.0 {
            let list = if q.is_empty() { "no one".to_string() } else { q.iter().cloned().collect::<Vec<_>>().join(", ") };
            writeln!(f, "| {agent} | {list} |")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn self_quantum_rejected() {
        assert_eq!(CutTable::from_pairs(&[("Alice", &["Alice"])]), Err(EpistemicError::SelfQuantum("Alice".into())));
    }

    #[test]
    fn json_round_trip() {
        let t = CutTable::frauchiger_renner();
        let text = serde_json::to_string(&t).unwrap();
        assert_eq!(CutTable::from_json(&text).unwrap(), t);
        assert!(!t.is_classical("Bob", "Debbie"));
        assert!(t.is_classical("Debbie", "Charlie"));
    }

    #[test]
    fn mutation_count() {
        let agents: Vec<String> = ["Alice", "Bob", "Charlie", "Debbie"].iter().map(|s| s.to_string()).collect();
        // 12 ordered pairs minus the 4 quantum entries already present.
        assert_eq!(CutTable::frauchiger_renner().single_mutations(&agents).len(), 8);
    }
}
