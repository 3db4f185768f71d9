use std::collections::BTreeMap;

use serde::Serialize;

use super::{EpistemicError, KnowledgeBase, Provenance, Rule, Statement};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Justification {
    Seed { family: String, note: String },
    Rule { rule: Rule },
}

/// Provenance unfolded down to seeds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationTree {
    pub statement: Statement,
    pub justification: Justification,
    pub children: Vec<DerivationTree>,
}

impl DerivationTree {
    pub fn is_seed(&self) -> bool {
        matches!(self.justification, Justification::Seed { .. })
    }

    /// Rules applied along the tree, post-order.
    pub fn rules(&self) -> Vec<Rule> {
        self.linearize().steps.iter().map(|s| s.rule).collect()
    }

    /// Post-order list of distinct derived statements, seeds listed apart.
    pub fn linearize(&self) -> Derivation {
        let mut d = Derivation { target: self.statement.clone(), seeds: Vec::new(), steps: Vec::new() };
        let mut numbers: BTreeMap<Statement, Option<usize>> = BTreeMap::new();
        self.walk(&mut d, &mut numbers);
        d
    }

    fn walk(&self, d: &mut Derivation, numbers: &mut BTreeMap<Statement, Option<usize>>) -> Option<usize> {
        if let Some(n) = numbers.get(&self.statement) {
            return *n;
        }
        let n = match &self.justification {
            Justification::Seed { family, note } => {
                d.seeds.push((self.statement.clone(), family.clone(), note.clone()));
                None
            }
            Justification::Rule { rule } => {
                let premises = self.children.iter().map(|c| (c.statement.clone(), c.walk(d, numbers))).collect();
                let number = d.steps.len() + 1;
                d.steps.push(DerivationStep { number, statement: self.statement.clone(), rule: *rule, premises });
                Some(number)
            }
        };
        numbers.insert(self.statement.clone(), n);
        n
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationStep {
    pub number: usize,
    pub statement: Statement,
    pub rule: Rule,
    /// Each premise with its step number, or `None` for a seed.
    pub premises: Vec<(Statement, Option<usize>)>,
}

/// A run of steps that starts with a consistency application (and the
/// protocol-knowledge step feeding it, if immediately before).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Phase {
    pub title: String,
    pub steps: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Derivation {
    pub target: Statement,
    /// `(statement, family, note)` in first-use order.
    pub seeds: Vec<(Statement, String, String)>,
    pub steps: Vec<DerivationStep>,
}

const ORDINALS: [&str; 10] = ["First", "Second", "Third", "Fourth", "Fifth", "Sixth", "Seventh", "Eighth", "Ninth", "Tenth"];

impl Derivation {
    pub fn phases(&self) -> Vec<Phase> {
        let mut groups: Vec<Vec<usize>> = Vec::new();
        for step in &self.steps {
            if !step.rule.is_consistency() && !groups.is_empty() {
                groups.last_mut().expect("non-empty").push(step.number);
                continue;
            }
            let mut g = Vec::new();
            if let Some(last) = groups.last_mut() {
                if last.last().is_some_and(|&prev| self.steps[prev - 1].rule == Rule::NestedLifting) {
                    g.extend(last.pop());
                }
            }
            groups.retain(|x| !x.is_empty());
            g.push(step.number);
            groups.push(g);
        }
        groups
            .into_iter()
            .enumerate()
            .map(|(i, steps)| Phase { title: ORDINALS.get(i).map_or_else(|| format!("Step group {}", i + 1), |s| s.to_string()), steps })
            .collect()
    }

    pub fn to_markdown(&self) -> String {
        let mut out = format!("## Derivation of {}\n\n", self.target);
        if !self.seeds.is_empty() {
            out.push_str("Seeds:\n\n");
            for (s, family, note) in &self.seeds {
                out.push_str(&format!("- {s}: {note} (family `{family}`)\n"));
            }
            out.push('\n');
        }
        for phase in self.phases() {
            out.push_str(&format!("### {}\n\n| step | statement | justification |\n|---|---|---|\n", phase.title));
            for n in phase.steps {
                let step = &self.steps[n - 1];
                let from: Vec<String> = step
                    .premises
                    .iter()
                    .map(|(s, num)| match num {
                        Some(k) => format!("({k})"),
                        None => format!("{s} (seed)"),
                    })
                    .collect();
                out.push_str(&format!("| ({}) | {} | {} from {} |\n", step.number, step.statement, step.rule, from.join(", ")));
            }
            out.push('\n');
        }
        out
    }
}

/// The provenance tree of `stmt` down to seeds.
pub fn explain(kb: &KnowledgeBase, stmt: &Statement) -> Result<DerivationTree, EpistemicError> {
    match kb.provenance(stmt) {
        None => Err(EpistemicError::StatementAbsent(stmt.to_string())),
        Some(Provenance::Seed { family, note }) => Ok(DerivationTree {
            statement: stmt.clone(),
            justification: Justification::Seed { family: family.clone(), note: note.clone() },
            children: Vec::new(),
        }),
        Some(Provenance::Derived { rule, premises }) => Ok(DerivationTree {
            statement: stmt.clone(),
            justification: Justification::Rule { rule: *rule },
            children: premises.iter().map(|p| explain(kb, p)).collect::<Result<_, _>>()?,
        }),
    }
}
