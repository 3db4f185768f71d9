use std::collections::BTreeMap;

use num_traits::Zero;
use serde::Serialize;

use crate::scenario::{event_distribution, realized_binding, Assignment, Scenario};

use super::{CutTable, EpistemicError, KnowledgeBase, Provenance, Statement};

/// Which agents reproduce whose reasoning.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum LiftScope {
    /// Only along the reasoning pattern.
    #[default]
    ReasoningPattern,
    /// Every agent reproduces every other agent's reasoning.
    AllPairs,
}

/// The shared protocol every agent knows.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Protocol {
    /// `(W, U)`: W predicts U's outcome from W's own.
    pub reasoning: Vec<(String, String)>,
    /// Outcomes fixed by post-selection, as `(variable, value)`.
    pub postselect: Vec<(String, String)>,
    pub settings: Assignment,
    pub lift: LiftScope,
}

impl Protocol {
    /// Alice about Debbie, Debbie about Charlie, Charlie about Bob, Bob about
    /// Alice; post-selecting `a=-`, `b=-`.
    pub fn frauchiger_renner() -> Self {
        let pair = |w: &str, u: &str| (w.to_string(), u.to_string());
        Protocol {
            reasoning: vec![pair("Alice", "Debbie"), pair("Debbie", "Charlie"), pair("Charlie", "Bob"), pair("Bob", "Alice")],
            postselect: vec![pair("a", "-"), pair("b", "-")],
            settings: Assignment::new(),
            lift: LiftScope::ReasoningPattern,
        }
    }

    fn lift_pairs(&self, agents: &[String]) -> Vec<(String, String)> {
        match self.lift {
            LiftScope::ReasoningPattern => self.reasoning.clone(),
            LiftScope::AllPairs => agents
                .iter()
                .flat_map(|w| agents.iter().filter(move |u| *u != w).map(move |u| (w.clone(), u.clone())))
                .collect(),
        }
    }
}

/// Seeds a knowledge base.
///
/// For each reasoning pair `(W, U)`, W's table over its own and U's outcome
/// is computed by projecting every outcome whose owner W views as classical
/// (plus both outcomes of the pair) and leaving the rest unitary; each exact
/// zero `p(w=α, u=β) = 0` seeds `K_W[w=α ⟹ u=¬β]`. Post-selected outcomes
/// seed `K_owner[v=x]`. Each base seed is then lifted to `K_W[K_U[s]]` for
/// every `(W, U)` in the lift scope; a family is a base seed with its lifts.
pub fn seed_knowledge(s: &Scenario, cuts: &CutTable, protocol: &Protocol) -> Result<KnowledgeBase, EpistemicError> {
    let agents: Vec<String> = s.agents.iter().map(|a| a.name.clone()).collect();
    let owners: BTreeMap<String, String> = s.outcomes.iter().map(|v| (v.name.clone(), v.owner.clone())).collect();
    let lift_pairs = protocol.lift_pairs(&agents);
    let mut kb = KnowledgeBase::new(agents.clone(), owners, lift_pairs.clone());
    if agents.is_empty() {
        return Ok(kb);
    }
    cuts.covers(&agents)?;
    let settings = &protocol.settings;
    let variable_of = |agent: &str| {
        s.outcomes
            .iter()
            .find(|v| v.owner == agent)
            .map(|v| v.name.clone())
            .ok_or_else(|| EpistemicError::NoVariable(agent.to_string()))
    };

    let mut base: Vec<(String, Statement, String)> = Vec::new();
    for (w, u) in &protocol.reasoning {
        let (wv, uv) = (variable_of(w)?, variable_of(u)?);
        let mut projected: Vec<&str> = Vec::new();
        for v in &s.outcomes {
            let in_pair = v.name == wv || v.name == uv;
            let classical = cuts.is_classical(w, &v.owner);
            if in_pair || (classical && realized_binding(s, settings, &v.name).is_ok()) {
                projected.push(&v.name);
            }
        }
        let table = event_distribution(s, settings, &projected)?.marginal(&[&wv, &uv])?;
        for e in &table.entries {
            if !e.exact.as_ref().is_some_and(Zero::is_zero) {
                continue;
            }
            let other = table.labels[1].iter().find(|l| **l != e.outcome[1]).expect("binary outcome");
            let stmt = Statement::knows(
                w,
                Statement::implies(Statement::atom(&wv, &e.outcome[0]), Statement::atom(&uv, other))?,
            );
            let note = format!("p({wv}={}, {uv}={}) = 0 under {w}'s cut", e.outcome[0], e.outcome[1]);
            base.push((format!("{w}:born"), stmt, note));
        }
    }
    if !protocol.postselect.is_empty() {
        let vars: Vec<&str> = protocol.postselect.iter().map(|(v, _)| v.as_str()).collect();
        let values: Vec<&str> = protocol.postselect.iter().map(|(_, x)| x.as_str()).collect();
        let table = event_distribution(s, settings, &vars)?;
        let describe = || protocol.postselect.iter().map(|(v, x)| format!("{v}={x}")).collect::<Vec<_>>().join(", ");
        if !table.probability(&values).is_some_and(|p| p > 0.0) {
            return Err(EpistemicError::PostselectionImpossible(describe()));
        }
        for (v, x) in &protocol.postselect {
            let owner = kb.owners().get(v).cloned().ok_or_else(|| EpistemicError::NoVariable(v.clone()))?;
            base.push((format!("{owner}:postselect"), Statement::knows(&owner, Statement::atom(v, x)), format!("post-selection on {}", describe())));
        }
    }

    for (family, stmt, note) in &base {
        kb.insert(stmt.clone(), Provenance::Seed { family: family.clone(), note: note.clone() });
    }
    for (family, stmt, _) in &base {
        let (u, _) = stmt.as_knows().expect("seeds are K_U[...]");
        for (w, target) in &lift_pairs {
            if target == u && w != u {
                kb.insert(
                    Statement::knows(w, stmt.clone()),
                    Provenance::Seed { family: family.clone(), note: format!("{w} reproduces {u}'s reasoning") },
                );
            }
        }
    }
    Ok(kb)
}
