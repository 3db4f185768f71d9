use std::collections::BTreeMap;

use serde::Serialize;

use super::{explain, CutTable, DerivationTree, EngineConfig, EpistemicError, KnowledgeBase, Provenance, Statement};

/// Forward-chains `config.rules` (in that order, each against the current
/// base) until nothing new is derived.
pub fn infer_fixpoint(kb: &KnowledgeBase, cuts: &CutTable, config: &EngineConfig) -> Result<KnowledgeBase, EpistemicError> {
    if config.depth_bound < 2 {
        return Err(EpistemicError::DepthBound(config.depth_bound));
    }
    for e in kb.entries() {
        check_depth(&e.statement, config.depth_bound)?;
    }
    let mut out = kb.clone();
    loop {
        let mut changed = false;
        for &rule in &config.rules {
            let snapshot: Vec<Statement> = out.entries().iter().map(|e| e.statement.clone()).collect();
            let mut fresh: Vec<(Statement, Vec<Statement>)> = Vec::new();
            {
                let ctx = out.rule_context(cuts, config);
                if rule.arity() == 1 {
                    for p in &snapshot {
                        for c in rule.conclusions(&[p], &ctx) {
                            fresh.push((c, vec![p.clone()]));
                        }
                    }
                } else {
                    for p in &snapshot {
                        for q in &snapshot {
                            for c in rule.conclusions(&[p, q], &ctx) {
                                fresh.push((c, vec![p.clone(), q.clone()]));
                            }
                        }
                    }
                }
            }
            for (c, premises) in fresh {
                if out.contains(&c) {
                    continue;
                }
                check_depth(&c, config.depth_bound)?;
                out.insert(c, Provenance::Derived { rule, premises });
                changed = true;
            }
        }
        if !changed {
            return Ok(out);
        }
    }
}

fn check_depth(s: &Statement, bound: usize) -> Result<(), EpistemicError> {
    if s.depth() > bound {
        return Err(EpistemicError::DepthExceeded { statement: s.to_string(), bound });
    }
    Ok(())
}

/// One agent knowing two different values of the same outcome.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Contradiction {
    pub agent: String,
    pub variable: String,
    pub values: Vec<String>,
    /// Derivation of `K_agent[variable=value]`, one per value.
    pub derivations: Vec<DerivationTree>,
}

/// All contradictions, in agent order then variable order.
pub fn detect_contradictions(kb: &KnowledgeBase) -> Vec<Contradiction> {
    let mut known: BTreeMap<(usize, &str, &str), Vec<&str>> = BTreeMap::new();
    for e in kb.entries() {
        let Some((agent, inner)) = e.statement.as_knows() else { continue };
        let Some((variable, value)) = inner.as_atom() else { continue };
        let rank = kb.agents().iter().position(|a| a == agent).unwrap_or(usize::MAX);
        let values = known.entry((rank, agent, variable)).or_default();
        if !values.contains(&value) {
            values.push(value);
        }
    }
    let mut out = Vec::new();
    for ((_, agent, variable), mut values) in known {
        if values.len() < 2 {
            continue;
        }
        values.sort();
        let derivations = values
            .iter()
            .map(|v| explain(kb, &Statement::knows(agent, Statement::atom(variable, v))).expect("statement is in the base"))
            .collect();
        out.push(Contradiction {
            agent: agent.to_string(),
            variable: variable.to_string(),
            values: values.iter().map(|v| v.to_string()).collect(),
            derivations,
        });
    }
    out
}

/// The first contradiction in agent order.
pub fn detect_contradiction(kb: &KnowledgeBase) -> Option<Contradiction> {
    detect_contradictions(kb).into_iter().next()
}
