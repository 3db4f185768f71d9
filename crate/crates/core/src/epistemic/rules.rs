use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use super::{CutTable, EpistemicError, Statement};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Rule {
    /// R1: `K_W[K_U[v=x]] ⟹ K_W[v=x]`.
    ConsistencyAtom,
    /// R2: `K_W[K_U[p ⟹ q]] ⟹ K_W[p ⟹ q]`.
    ConsistencyImplication,
    /// R3: in-context modus ponens.
    ModusPonens,
    /// R4: in-context transitivity.
    Transitivity,
    /// R5: protocol knowledge of derived implications.
    NestedLifting,
}

impl Rule {
    pub const ALL: [Rule; 5] =
        [Rule::ConsistencyAtom, Rule::ConsistencyImplication, Rule::ModusPonens, Rule::Transitivity, Rule::NestedLifting];

    pub fn code(self) -> &'static str {
        match self {
            Rule::ConsistencyAtom => "R1",
            Rule::ConsistencyImplication => "R2",
            Rule::ModusPonens => "R3",
            Rule::Transitivity => "R4",
            Rule::NestedLifting => "R5",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Rule::ConsistencyAtom => "consistency (outcome)",
            Rule::ConsistencyImplication => "consistency (implication)",
            Rule::ModusPonens => "modus ponens",
            Rule::Transitivity => "transitivity",
            Rule::NestedLifting => "protocol knowledge",
        }
    }

    pub fn is_consistency(self) -> bool {
        matches!(self, Rule::ConsistencyAtom | Rule::ConsistencyImplication)
    }

    pub fn arity(self) -> usize {
        match self {
            Rule::ModusPonens | Rule::Transitivity => 2,
            _ => 1,
        }
    }

    /// Every conclusion the rule draws from exactly these premises.
    pub(crate) fn conclusions(self, premises: &[&Statement], ctx: &RuleContext) -> Vec<Statement> {
        match (self, premises) {
            (Rule::ConsistencyAtom, [p]) => {
                let Some((w, u, inner)) = nested(p) else { return vec![] };
                if inner.as_atom().is_some() && ctx.consistency_allowed(w, u, inner) {
                    vec![Statement::knows(w, inner.clone())]
                } else {
                    vec![]
                }
            }
            (Rule::ConsistencyImplication, [p]) => {
                let Some((w, u, inner)) = nested(p) else { return vec![] };
                if inner.as_implies().is_some() && ctx.consistency_allowed(w, u, inner) {
                    let who = if ctx.literal_implication { u } else { w };
                    vec![Statement::knows(who, inner.clone())]
                } else {
                    vec![]
                }
            }
            (Rule::ModusPonens, [imp, ante]) => {
                let (Some((w, i)), Some((w2, a))) = (flat(imp), flat(ante)) else { return vec![] };
                match i.as_implies() {
                    Some((p, q)) if w == w2 && p == a => vec![Statement::knows(w, q.clone())],
                    _ => vec![],
                }
            }
            (Rule::Transitivity, [first, second]) => {
                let (Some((w, i1)), Some((w2, i2))) = (flat(first), flat(second)) else { return vec![] };
                match (i1.as_implies(), i2.as_implies()) {
                    (Some((p, q)), Some((q2, r))) if w == w2 && q == q2 && p != r => {
                        vec![Statement::knows(w, Statement::Implies(Box::new(p.clone()), Box::new(r.clone())))]
                    }
                    _ => vec![],
                }
            }
            (Rule::NestedLifting, [p]) => {
                let Some((u, inner)) = flat(p) else { return vec![] };
                if inner.as_implies().is_none() {
                    return vec![];
                }
                ctx.lift_pairs
                    .iter()
                    .filter(|(w, target)| target == u && w != u)
                    .map(|(w, _)| Statement::knows(w, (*p).clone()))
                    .collect()
            }
            _ => vec![],
        }
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.code(), self.description())
    }
}

/// `K_W[K_U[s]]` with `s` free of knowledge operators.
fn nested(s: &Statement) -> Option<(&str, &str, &Statement)> {
    let (w, inner) = s.as_knows()?;
    let (u, body) = inner.as_knows()?;
    (body.depth() == 0 && w != u).then_some((w, u, body))
}

/// `K_W[s]` with `s` free of knowledge operators.
fn flat(s: &Statement) -> Option<(&str, &Statement)> {
    let (w, inner) = s.as_knows()?;
    (inner.depth() == 0).then_some((w, inner))
}

pub(crate) struct RuleContext<'a> {
    pub cuts: &'a CutTable,
    pub owners: &'a BTreeMap<String, String>,
    pub lift_pairs: &'a [(String, String)],
    pub literal_implication: bool,
}

impl RuleContext<'_> {
    /// `W` views `U` as classical, and both view every outcome owner in `body` as classical.
    fn consistency_allowed(&self, w: &str, u: &str, body: &Statement) -> bool {
        if !self.cuts.is_classical(w, u) {
            return false;
        }
        body.variables().iter().all(|v| match self.owners.get(*v) {
            Some(owner) => self.cuts.is_classical(w, owner) && self.cuts.is_classical(u, owner),
            None => false,
        })
    }
}

/// Rules to run, in application order, and the depth bound.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EngineConfig {
    pub depth_bound: usize,
    pub rules: Vec<Rule>,
    /// Conclude `K_U[p ⟹ q]` in R2, as the implication form is literally written.
    pub literal_implication_consistency: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { depth_bound: 3, rules: Rule::ALL.to_vec(), literal_implication_consistency: false }
    }
}

impl EngineConfig {
    pub fn without(mut self, rule: Rule) -> Self {
        self.rules.retain(|r| *r != rule);
        self
    }

    pub fn without_consistency(self) -> Self {
        self.without(Rule::ConsistencyAtom).without(Rule::ConsistencyImplication)
    }
}

/// What `--ablate` can remove.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Ablation {
    Consistency,
    Rule(Rule),
    Seed(String),
}

impl FromStr for Ablation {
    type Err = EpistemicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(family) = t.strip_prefix("seed:") {
            return Ok(Ablation::Seed(family.to_string()));
        }
        let lower = t.to_ascii_lowercase();
        if lower == "consistency" {
            return Ok(Ablation::Consistency);
        }
        Rule::ALL
            .iter()
            .find(|r| r.code().eq_ignore_ascii_case(&lower))
            .map(|r| Ablation::Rule(*r))
            .ok_or_else(|| EpistemicError::UnknownAblation(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx<'a>(cuts: &'a CutTable, owners: &'a BTreeMap<String, String>, pairs: &'a [(String, String)]) -> RuleContext<'a> {
        RuleContext { cuts, owners, lift_pairs: pairs, literal_implication: false }
    }

    fn owners() -> BTreeMap<String, String> {
        [("a", "Alice"), ("b", "Bob"), ("c", "Charlie"), ("d", "Debbie")]
            .iter()
            .map(|(v, o)| (v.to_string(), o.to_string()))
            .collect()
    }

    #[test]
    fn consistency_respects_cuts() {
        let cuts = CutTable::frauchiger_renner();
        let o = owners();
        let c = ctx(&cuts, &o, &[]);
        let s = Statement::parse("K_Debbie[K_Charlie[c=0 => b=+]]").unwrap();
        assert_eq!(
            Rule::ConsistencyImplication.conclusions(&[&s], &c),
            vec![Statement::parse("K_Debbie[c=0 => b=+]").unwrap()]
        );
        let blocked = Statement::parse("K_Bob[K_Alice[a=- => d=1]]").unwrap();
        assert!(Rule::ConsistencyImplication.conclusions(&[&blocked], &c).is_empty());
        let mutated = cuts.with_quantum("Charlie", "Bob").unwrap();
        let c2 = ctx(&mutated, &o, &[]);
        assert!(Rule::ConsistencyImplication.conclusions(&[&s], &c2).is_empty());
    }

    #[test]
    fn modus_ponens_and_transitivity() {
        let cuts = CutTable::default();
        let o = owners();
        let c = ctx(&cuts, &o, &[]);
        let imp = Statement::parse("K_Bob[a=- => b=+]").unwrap();
        let ante = Statement::parse("K_Bob[a=-]").unwrap();
        assert_eq!(Rule::ModusPonens.conclusions(&[&imp, &ante], &c), vec![Statement::parse("K_Bob[b=+]").unwrap()]);
        let i1 = Statement::parse("K_Alice[a=- => d=1]").unwrap();
        let i2 = Statement::parse("K_Alice[d=1 => b=+]").unwrap();
        assert_eq!(Rule::Transitivity.conclusions(&[&i1, &i2], &c), vec![Statement::parse("K_Alice[a=- => b=+]").unwrap()]);
        assert!(Rule::Transitivity.conclusions(&[&i2, &i1], &c).is_empty());
    }

    #[test]
    fn ablation_parsing() {
        assert_eq!("consistency".parse::<Ablation>().unwrap(), Ablation::Consistency);
        assert_eq!("r4".parse::<Ablation>().unwrap(), Ablation::Rule(Rule::Transitivity));
        assert_eq!("seed:Bob:postselect".parse::<Ablation>().unwrap(), Ablation::Seed("Bob:postselect".into()));
        assert!("R9".parse::<Ablation>().is_err());
    }
}
