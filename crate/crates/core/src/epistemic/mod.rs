//! Nested-knowledge forward chaining for the four-agent Hardy-state argument.
//!
//! Seeds are each agent's Born-rule zeros computed under that agent's cut,
//! post-selected outcomes, and protocol knowledge `K_W[K_U[s]]` along the
//! reasoning pattern (who reasons about whose outcome). Rules:
//!
//! - R1 `K_W[K_U[v=x]] ⟹ K_W[v=x]`
//! - R2 `K_W[K_U[p ⟹ q]] ⟹ K_W[p ⟹ q]`
//! - R3 `K_W[p], K_W[p ⟹ q] ⟹ K_W[q]`
//! - R4 `K_W[p ⟹ q], K_W[q ⟹ r] ⟹ K_W[p ⟹ r]`
//! - R5 `K_U[p ⟹ q] ⟹ K_W[K_U[p ⟹ q]]` for each `(W, U)` in the lift scope
//!
//! R1 and R2 fire only when both `W` and `U` view `U` and the owners of the
//! mentioned outcomes as classical.

mod cuts;
mod engine;
mod explain;
mod kb;
mod rules;
mod seed;
mod statement;

use thiserror::Error;

use crate::scenario::ScenarioError;

pub use cuts::CutTable;
pub use engine::{detect_contradiction, detect_contradictions, infer_fixpoint, Contradiction};
pub use explain::{explain, Derivation, DerivationStep, DerivationTree, Justification, Phase};
pub use kb::{Entry, KnowledgeBase, Provenance};
pub use rules::{Ablation, EngineConfig, Rule};
pub use seed::{seed_knowledge, LiftScope, Protocol};
pub use statement::Statement;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EpistemicError {
    #[error("cut table has no entry for agent `{0}`")]
    MissingAgent(String),
    #[error("agent `{0}` cannot view itself as quantum")]
    SelfQuantum(String),
    #[error("depth bound must be at least 2, got {0}")]
    DepthBound(usize),
    #[error("`{statement}` exceeds the depth bound {bound}")]
    DepthExceeded { statement: String, bound: usize },
    #[error("knowledge operators are not allowed inside implications: {0}")]
    KnowsInsideImplies(String),
    #[error("statement `{0}` is not in the knowledge base")]
    StatementAbsent(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown ablation `{0}` (expected consistency, R1..R5, or seed:FAMILY)")]
    UnknownAblation(String),
    #[error("unknown seed family `{0}`")]
    UnknownFamily(String),
    #[error("agent `{0}` owns no outcome variable")]
    NoVariable(String),
    #[error("post-selected outcome {0} has probability zero")]
    PostselectionImpossible(String),
    #[error("replay failed for `{0}`")]
    ReplayFailed(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::lookup;

    fn fr_seeds(cuts: &CutTable) -> KnowledgeBase {
        seed_knowledge(&lookup("pusey_masanes_fr").unwrap(), cuts, &Protocol::frauchiger_renner()).unwrap()
    }

    fn st(s: &str) -> Statement {
        Statement::parse(s).unwrap()
    }

    #[test]
    fn seeds_match_the_three_predictions() {
        let kb = fr_seeds(&CutTable::frauchiger_renner());
        for s in [
            "K_Charlie[c=0 => b=+]",
            "K_Debbie[d=1 => c=0]",
            "K_Alice[a=- => d=1]",
            "K_Alice[a=-]",
            "K_Bob[b=-]",
            "K_Debbie[K_Charlie[c=0 => b=+]]",
            "K_Bob[K_Alice[a=-]]",
        ] {
            assert!(kb.contains(&st(s)), "{s}");
        }
        assert_eq!(kb.families().len(), 5);
        assert_eq!(kb.seeds().count(), 10);
    }

    #[test]
    fn full_ruleset_contradicts_bob() {
        let cuts = CutTable::frauchiger_renner();
        let config = EngineConfig::default();
        let kb = infer_fixpoint(&fr_seeds(&cuts), &cuts, &config).unwrap();
        let c = detect_contradiction(&kb).unwrap();
        assert_eq!((c.agent.as_str(), c.variable.as_str()), ("Bob", "b"));
        assert_eq!(c.values, vec!["+", "-"]);
        assert_eq!(detect_contradictions(&kb).len(), 1);
        kb.replay(&cuts, &config).unwrap();
        let d = explain(&kb, &st("K_Bob[b=+]")).unwrap().linearize();
        assert_eq!(d.steps.len(), 9);
        let phases: Vec<usize> = d.phases().iter().map(|p| p.steps.len()).collect();
        assert_eq!(phases, vec![2, 3, 2, 2]);
    }

    #[test]
    fn alice_implication_uses_r2_then_r4() {
        let cuts = CutTable::frauchiger_renner();
        let kb = infer_fixpoint(&fr_seeds(&cuts), &cuts, &EngineConfig::default()).unwrap();
        let t = explain(&kb, &st("K_Alice[a=- => b=+]")).unwrap();
        let rules = t.rules();
        assert_eq!(&rules[rules.len() - 2..], &[Rule::ConsistencyImplication, Rule::Transitivity]);
        assert!(explain(&kb, &st("K_Alice[a=-]")).unwrap().is_seed());
        assert!(explain(&kb, &st("K_Alice[b=-]")).is_err());
    }

    #[test]
    fn seeds_alone_are_consistent() {
        assert!(detect_contradiction(&fr_seeds(&CutTable::frauchiger_renner())).is_none());
    }

    #[test]
    fn consistency_is_needed() {
        let cuts = CutTable::frauchiger_renner();
        let kb = infer_fixpoint(&fr_seeds(&cuts), &cuts, &EngineConfig::default().without_consistency()).unwrap();
        assert!(!kb.contains(&st("K_Bob[b=+]")));
        assert!(detect_contradiction(&kb).is_none());
    }

    #[test]
    fn literal_implication_form_breaks_the_chain() {
        let cuts = CutTable::frauchiger_renner();
        let config = EngineConfig { literal_implication_consistency: true, ..Default::default() };
        let kb = infer_fixpoint(&fr_seeds(&cuts), &cuts, &config).unwrap();
        assert!(detect_contradiction(&kb).is_none());
    }

    #[test]
    fn debbie_viewing_charlie_as_quantum_keeps_her_seed() {
        let cuts = CutTable::frauchiger_renner().with_quantum("Debbie", "Charlie").unwrap();
        let seeds = fr_seeds(&cuts);
        assert!(seeds.contains(&st("K_Debbie[d=1 => c=0]")));
        let kb = infer_fixpoint(&seeds, &cuts, &EngineConfig::default()).unwrap();
        assert!(!kb.contains(&st("K_Debbie[c=0 => b=+]")));
        assert!(detect_contradiction(&kb).is_none());
    }

    #[test]
    fn alice_needs_charlie_quantum_for_her_zero() {
        let entries = [("Alice", &[][..]), ("Bob", &["Charlie", "Debbie"][..]), ("Charlie", &["Debbie"][..]), ("Debbie", &[][..])];
        let seeds = fr_seeds(&CutTable::from_pairs(&entries).unwrap());
        assert!(!seeds.contains(&st("K_Alice[a=- => d=1]")));
    }

    #[test]
    fn errors() {
        let s = lookup("pusey_masanes_fr").unwrap();
        let cuts = CutTable::from_pairs(&[("Alice", &[])]).unwrap();
        assert_eq!(seed_knowledge(&s, &cuts, &Protocol::frauchiger_renner()), Err(EpistemicError::MissingAgent("Bob".into())));
        let c = CutTable::frauchiger_renner();
        let config = EngineConfig { depth_bound: 1, ..Default::default() };
        assert_eq!(infer_fixpoint(&fr_seeds(&c), &c, &config), Err(EpistemicError::DepthBound(1)));
        let mut empty = s.clone();
        empty.agents.clear();
        assert!(seed_knowledge(&empty, &c, &Protocol::frauchiger_renner()).unwrap().is_empty());
    }
}
