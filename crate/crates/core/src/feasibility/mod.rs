//! Exact rational linear feasibility and the problems built on it: joint
//! distributions reproducing pairwise laws, local-polytope membership of
//! two-setting behaviors, and joint measurability of qubit measurements.

mod certificate;
mod fine;
mod guerin;
mod lp;
mod marginal;
mod povm;

use thiserror::Error;

use crate::qcore::QcoreError;
use crate::scenario::ScenarioError;

pub use certificate::CertificateFile;
pub use fine::fine_membership;
pub use guerin::{guerin_marginal_check, GuerinReport, MARGINAL_TOL};
pub use lp::{lp_feasible, Bound, Constraint, FarkasCertificate, FeasibilityResult, LinearProgram, Relation, Variable};
pub use marginal::{pairwise_marginal_feasibility, JointDistribution, MarginalResult, MarginalSpec, PairTarget};
pub use povm::{
    povm_joint_feasibility, povm_sweep, OracleResult, PovmResult, QubitMeasurementPair, GRID_POINTS, ORACLE_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeasibilityError {
    #[error("variable `{0}` is not binary")]
    NonBinary(String),
    #[error("table over ({0}) is not pairwise")]
    NotPairwise(String),
    #[error("table over ({0}) has entries that do not snap to exact rationals")]
    NotSnapped(String),
    #[error("malformed target: {0}")]
    MalformedTarget(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("expected a single-qubit input")]
    NotQubit,
    #[error("certificate parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{lookup, Assignment, Behavior};

    const PM_PAIRS: [(&str, &str); 4] = [("c", "d"), ("c", "b"), ("a", "d"), ("a", "b")];

    fn pm_spec() -> MarginalSpec {
        MarginalSpec::from_scenario(&lookup("pusey_masanes_fr").unwrap(), &Assignment::new(), &PM_PAIRS).unwrap()
    }

    #[test]
    fn pm_four_laws_infeasible_three_feasible() {
        let spec = pm_spec();
        let all = pairwise_marginal_feasibility(&spec).unwrap();
        assert!(!all.is_feasible() && all.verified());
        for (u, v) in PM_PAIRS {
            let r = pairwise_marginal_feasibility(&spec.without_pair(u, v)).unwrap();
            assert!(r.is_feasible() && r.verified(), "without ({u},{v})");
            let born = spec.targets.iter().find(|t| t.pair == (u.to_string(), v.to_string())).unwrap();
            let mut law = r.joint.unwrap().marginal(u, v);
            law.sort();
            let mut target = born.law.clone();
            target.sort();
            assert_ne!(law, target);
        }
    }

    #[test]
    fn malformed_target_rejected() {
        let mut spec = pm_spec();
        spec.targets[0].law[0].1 += crate::qcore::Rational::from_integer(1.into());
        assert!(matches!(pairwise_marginal_feasibility(&spec), Err(FeasibilityError::MalformedTarget(_))));
    }

    #[test]
    fn fine_membership_cases() {
        assert!(!fine_membership(&Behavior::hardy()).unwrap().is_feasible());
        assert!(!fine_membership(&Behavior::pr_box()).unwrap().is_feasible());
        assert!(fine_membership(&Behavior::deterministic(0, 0, 0, 0)).unwrap().is_feasible());
    }

    #[test]
    fn certificate_round_trip() {
        let r = pairwise_marginal_feasibility(&pm_spec()).unwrap();
        let file = CertificateFile::new("pm", &r);
        let back = CertificateFile::from_json(&file.to_json()).unwrap();
        assert_eq!(back, file);
        assert!(back.verify());
    }
}
