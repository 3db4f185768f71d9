use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::rules::RuleContext;
use super::{CutTable, EngineConfig, EpistemicError, Rule, Statement};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Seed { family: String, note: String },
    Derived { rule: Rule, premises: Vec<Statement> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Entry {
    pub statement: Statement,
    pub provenance: Provenance,
}

/// Duplicate-free statements in insertion order, each with its provenance.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct KnowledgeBase {
    agents: Vec<String>,
    /// Outcome variable to owning agent.
    owners: BTreeMap<String, String>,
    /// `(W, U)`: W can reproduce U's reasoning.
    lift_pairs: Vec<(String, String)>,
    entries: Vec<Entry>,
    #[serde(skip)]
    index: BTreeMap<Statement, usize>,
}

impl KnowledgeBase {
    pub fn new(agents: Vec<String>, owners: BTreeMap<String, String>, lift_pairs: Vec<(String, String)>) -> Self {
        KnowledgeBase { agents, owners, lift_pairs, entries: Vec::new(), index: BTreeMap::new() }
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn owners(&self) -> &BTreeMap<String, String> {
        &self.owners
    }

    pub fn lift_pairs(&self) -> &[(String, String)] {
        &self.lift_pairs
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, s: &Statement) -> bool {
        self.index.contains_key(s)
    }

    pub fn provenance(&self, s: &Statement) -> Option<&Provenance> {
        self.index.get(s).map(|&i| &self.entries[i].provenance)
    }

    pub fn statements(&self) -> BTreeSet<&Statement> {
        self.index.keys().collect()
    }

    /// Inserts unless present; returns whether it was new.
    pub fn insert(&mut self, statement: Statement, provenance: Provenance) -> bool {
        if self.index.contains_key(&statement) {
            return false;
        }
        self.index.insert(statement.clone(), self.entries.len());
        self.entries.push(Entry { statement, provenance });
        true
    }

    pub fn seeds(&self) -> impl Iterator<Item = &Entry> {
        self.entries.iter().filter(|e| matches!(e.provenance, Provenance::Seed { .. }))
    }

    pub fn families(&self) -> BTreeSet<&str> {
        self.seeds()
            .filter_map(|e| match &e.provenance {
                Provenance::Seed { family, .. } => Some(family.as_str()),
                _ => None,
            })
            .collect()
    }

    /// The seeds alone, minus one family (matched case-insensitively).
    pub fn without_family(&self, family: &str) -> Result<KnowledgeBase, EpistemicError> {
        let known = self.families().into_iter().find(|f| f.eq_ignore_ascii_case(family));
        let Some(known) = known else {
            return Err(EpistemicError::UnknownFamily(family.to_string()));
        };
        let mut kb = KnowledgeBase::new(self.agents.clone(), self.owners.clone(), self.lift_pairs.clone());
        for e in self.seeds() {
            if !matches!(&e.provenance, Provenance::Seed { family, .. } if family == known) {
                kb.insert(e.statement.clone(), e.provenance.clone());
            }
        }
        Ok(kb)
    }

    pub(crate) fn rule_context<'a>(&'a self, cuts: &'a CutTable, config: &EngineConfig) -> RuleContext<'a> {
        RuleContext {
            cuts,
            owners: &self.owners,
            lift_pairs: &self.lift_pairs,
            literal_implication: config.literal_implication_consistency,
        }
    }

    /// Re-checks every derived entry: premises earlier in the base, and the
    /// rule draws this conclusion from them.
    pub fn replay(&self, cuts: &CutTable, config: &EngineConfig) -> Result<(), EpistemicError> {
        let ctx = self.rule_context(cuts, config);
        for (i, e) in self.entries.iter().enumerate() {
            if let Provenance::Derived { rule, premises } = &e.provenance {
                let earlier = premises.iter().all(|p| self.index.get(p).is_some_and(|&j| j < i));
                let refs: Vec<&Statement> = premises.iter().collect();
                if !earlier || !rule.conclusions(&refs, &ctx).contains(&e.statement) {
                    return Err(EpistemicError::ReplayFailed(e.statement.to_string()));
                }
            }
        }
        Ok(())
    }
}
