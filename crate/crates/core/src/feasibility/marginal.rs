use num_traits::{One, Zero};
use serde::Serialize;

use crate::qcore::Rational;
use crate::scenario::CorrelationTable;

use super::lp::{lp_feasible, FeasibilityResult, LinearProgram, Relation};
use super::FeasibilityError;

/// One target law `p(u, v)` over labelled outcomes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairTarget {
    pub pair: (String, String),
    /// `((u value, v value), probability)`.
    pub law: Vec<((String, String), Rational)>,
}

/// Binary variables and the pairwise laws a joint distribution must reproduce.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarginalSpec {
    pub variables: Vec<(String, [String; 2])>,
    pub targets: Vec<PairTarget>,
}

impl MarginalSpec {
    /// Variables in first-appearance order across the tables.
    pub fn from_tables(tables: &[CorrelationTable]) -> Result<Self, FeasibilityError> {
        let mut variables: Vec<(String, [String; 2])> = Vec::new();
        let mut targets = Vec::new();
        for t in tables {
            if t.variables.len() != 2 {
                return Err(FeasibilityError::NotPairwise(t.variables.join(",")));
            }
            for (v, labels) in t.variables.iter().zip(&t.labels) {
                if labels.len() != 2 {
                    return Err(FeasibilityError::NonBinary(v.clone()));
                }
                let pair = [labels[0].clone(), labels[1].clone()];
                match variables.iter().find(|(n, _)| n == v) {
                    Some((_, existing)) if *existing != pair => return Err(FeasibilityError::NonBinary(v.clone())),
                    Some(_) => {}
                    None => variables.push((v.clone(), pair)),
                }
            }
            let law = t
                .entries
                .iter()
                .map(|e| {
                    let p = e.exact.clone().ok_or_else(|| FeasibilityError::NotSnapped(t.variables.join(",")))?;
                    Ok(((e.outcome[0].clone(), e.outcome[1].clone()), p))
                })
                .collect::<Result<Vec<_>, FeasibilityError>>()?;
            targets.push(PairTarget { pair: (t.variables[0].clone(), t.variables[1].clone()), law });
        }
        Ok(MarginalSpec { variables, targets })
    }

    pub fn without_pair(&self, u: &str, v: &str) -> MarginalSpec {
        let mut s = self.clone();
        s.targets.retain(|t| !((t.pair.0 == u && t.pair.1 == v) || (t.pair.0 == v && t.pair.1 == u)));
        s
    }

    fn index_of(&self, name: &str) -> Result<usize, FeasibilityError> {
        self.variables.iter().position(|(n, _)| n == name).ok_or_else(|| FeasibilityError::UnknownVariable(name.into()))
    }

    /// Assignment index `k` gives variable `i` the label `(k >> (n-1-i)) & 1`.
    pub fn assignments(&self) -> Vec<Vec<String>> {
        let n = self.variables.len();
        (0..1usize << n)
            .map(|k| self.variables.iter().enumerate().map(|(i, (_, l))| l[(k >> (n - 1 - i)) & 1].clone()).collect())
            .collect()
    }

    /// Nonnegative joint probabilities, normalization, then one equality per target entry.
    pub fn to_lp(&self) -> Result<LinearProgram, FeasibilityError> {
        let assignments = self.assignments();
        let names: Vec<String> = assignments.iter().map(|a| format!("q({})", a.join(","))).collect();
        let mut lp = LinearProgram::nonnegative(&names);
        lp.add("normalization", vec![Rational::one(); names.len()], Relation::Eq, Rational::one());
        for t in &self.targets {
            let total: Rational = t.law.iter().map(|(_, p)| p.clone()).sum();
            if total != Rational::one() {
                return Err(FeasibilityError::MalformedTarget(format!("p({},{}) sums to {}", t.pair.0, t.pair.1, total)));
            }
            let (iu, iv) = (self.index_of(&t.pair.0)?, self.index_of(&t.pair.1)?);
            for ((x, y), p) in &t.law {
                let coefficients = assignments
                    .iter()
                    .map(|a| if a[iu] == *x && a[iv] == *y { Rational::one() } else { Rational::zero() })
                    .collect();
                lp.add(&format!("p({}={x}, {}={y})", t.pair.0, t.pair.1), coefficients, Relation::Eq, p.clone());
            }
        }
        Ok(lp)
    }
}

/// A joint distribution over the target variables, in assignment order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointDistribution {
    pub variables: Vec<String>,
    pub entries: Vec<(Vec<String>, Rational)>,
}

impl JointDistribution {
    pub fn marginal(&self, u: &str, v: &str) -> Vec<((String, String), Rational)> {
        let iu = self.variables.iter().position(|x| x == u).expect("known variable");
        let iv = self.variables.iter().position(|x| x == v).expect("known variable");
        let mut out: Vec<((String, String), Rational)> = Vec::new();
        for (a, p) in &self.entries {
            let key = (a[iu].clone(), a[iv].clone());
            match out.iter_mut().find(|(k, _)| *k == key) {
                Some((_, acc)) => *acc += p,
                None => out.push((key, p.clone())),
            }
        }
        out
    }

    /// Entries with nonzero probability.
    pub fn support(&self) -> impl Iterator<Item = &(Vec<String>, Rational)> {
        self.entries.iter().filter(|(_, p)| !p.is_zero())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MarginalResult {
    pub program: LinearProgram,
    pub result: FeasibilityResult,
    /// Decoded witness when feasible.
    #[serde(skip)]
    pub joint: Option<JointDistribution>,
}

impl MarginalResult {
    pub fn is_feasible(&self) -> bool {
        self.result.is_feasible()
    }

    /// Re-checks the witness or certificate exactly.
    pub fn verified(&self) -> bool {
        match &self.result {
            FeasibilityResult::Feasible { witness } => self.program.check_witness(witness),
            FeasibilityResult::Infeasible { certificate } => self.program.check_certificate(certificate),
        }
    }
}

/// Does a joint distribution over all variables reproduce every target law?
pub fn pairwise_marginal_feasibility(spec: &MarginalSpec) -> Result<MarginalResult, FeasibilityError> {
    let program = spec.to_lp()?;
    let result = lp_feasible(&program);
    let joint = result.witness().map(|w| JointDistribution {
        variables: spec.variables.iter().map(|(n, _)| n.clone()).collect(),
        entries: spec.assignments().into_iter().zip(w.iter().cloned()).collect(),
    });
    Ok(MarginalResult { program, result, joint })
}

impl MarginalSpec {
    /// Born tables of the given pairs under one setting assignment.
    pub fn from_scenario(
        s: &crate::scenario::Scenario,
        settings: &crate::scenario::Assignment,
        pairs: &[(&str, &str)],
    ) -> Result<Self, FeasibilityError> {
        let tables = pairs
            .iter()
            .map(|(u, v)| crate::scenario::event_distribution(s, settings, &[u, v]))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_tables(&tables)
    }
}
