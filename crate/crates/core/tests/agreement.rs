//! Cross-checks between independent decision procedures.

use ewf_core::feasibility::fine_membership;
use ewf_core::possibilistic::{
    enumerate_value_assignments, extract_implications, find_contradiction, ValueConstraints,
};
use ewf_core::qcore::Rational;
use ewf_core::scenario::{event_distribution, local_agency_report, lookup, Assignment, Behavior, CorrelationTable};
use num_traits::Zero;
use proptest::prelude::*;

const PM_PAIRS: [(&str, &str); 4] = [("c", "d"), ("c", "b"), ("a", "d"), ("a", "b")];

fn deterministic_points() -> Vec<Behavior> {
    (0..16).map(|n| Behavior::deterministic(n >> 3 & 1, n >> 2 & 1, n >> 1 & 1, n & 1)).collect()
}

fn uniform(parts: Vec<Behavior>) -> Behavior {
    let w = Rational::new(1.into(), (parts.len() as i64).into());
    Behavior::mixture(&parts.into_iter().map(|b| (w.clone(), b)).collect::<Vec<_>>())
}

/// Deterministic points that vanish wherever `b` does.
fn zero_compatible(b: &Behavior) -> Vec<Behavior> {
    deterministic_points()
        .into_iter()
        .filter(|d| {
            (0..16).all(|k| !b.get(k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1).is_zero() || d.get(k >> 3 & 1, k >> 2 & 1, k >> 1 & 1, k & 1).is_zero())
        })
        .collect()
}

fn lp_and_enumeration(b: &Behavior) -> (bool, bool) {
    let lp = fine_membership(b).unwrap();
    assert!(lp.verified());
    let empty = enumerate_value_assignments(&ValueConstraints::from_behavior(b)).is_empty();
    (lp.is_feasible(), empty)
}

#[test]
fn named_behaviors_agree() {
    let mut cases = vec![("hardy", Behavior::hardy()), ("pr_box", Behavior::pr_box())];
    cases.extend(deterministic_points().into_iter().map(|d| ("deterministic", d)));
    cases.push(("from_scenario(hardy)", Behavior::from_scenario(&lookup("hardy").unwrap(), "a", "b").unwrap()));
    for (name, b) in cases {
        let (feasible, empty) = lp_and_enumeration(&b);
        assert_eq!(!feasible, empty, "{name}");
    }
}

#[test]
fn hardy_has_compatible_local_points() {
    assert!(!zero_compatible(&Behavior::hardy()).is_empty());
    assert!(zero_compatible(&Behavior::pr_box()).is_empty());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn local_mixtures_feasible_with_assignments(mask in 1u16..) {
        let parts: Vec<Behavior> =
            deterministic_points().into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| d).collect();
        let (feasible, empty) = lp_and_enumeration(&uniform(parts));
        prop_assert!(feasible && !empty);
    }

    #[test]
    fn hardy_zeros_with_local_noise_stay_infeasible(mask in any::<u16>()) {
        let compatible = zero_compatible(&Behavior::hardy());
        let mut parts = vec![Behavior::hardy()];
        parts.extend(compatible.into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| d));
        let (feasible, empty) = lp_and_enumeration(&uniform(parts));
        prop_assert!(!feasible && empty);
    }

    #[test]
    fn empty_enumeration_implies_infeasible(mask in any::<u16>(), pr in any::<bool>()) {
        let mut parts: Vec<Behavior> =
            deterministic_points().into_iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, d)| d).collect();
        if pr || parts.is_empty() {
            parts.push(Behavior::pr_box());
        }
        let (feasible, empty) = lp_and_enumeration(&uniform(parts));
        prop_assert!(!(empty && feasible));
    }
}

fn pm_tables() -> Vec<CorrelationTable> {
    let s = lookup("pusey_masanes_fr").unwrap();
    PM_PAIRS.iter().map(|(u, v)| event_distribution(&s, &Assignment::new(), &[u, v]).unwrap()).collect()
}

fn search_and_enumeration(tables: &[CorrelationTable]) -> (bool, bool) {
    let g = extract_implications(tables).unwrap();
    let found = find_contradiction(&g).is_some();
    let empty = enumerate_value_assignments(&ValueConstraints::from_graph(&g)).is_empty();
    (found, empty)
}

#[test]
fn search_matches_enumeration_on_built_ins() {
    let mut cases: Vec<(String, Vec<CorrelationTable>)> = vec![("pusey_masanes_fr".into(), pm_tables())];
    for (u, v) in PM_PAIRS {
        let t: Vec<CorrelationTable> = pm_tables().into_iter().filter(|t| t.variables != [u, v]).collect();
        cases.push((format!("pusey_masanes_fr without ({u},{v})"), t));
    }
    let mirror = lookup("pusey_masanes_fr(mirror)").unwrap();
    cases.push((
        "pusey_masanes_fr(mirror)".into(),
        PM_PAIRS.iter().map(|(u, v)| event_distribution(&mirror, &Assignment::new(), &[u, v]).unwrap()).collect(),
    ));
    cases.push(("brukner_lf at x=1,y=1".into(), local_agency_report(&lookup("brukner_lf").unwrap()).unwrap().tables));
    for b in [Behavior::hardy(), Behavior::pr_box(), Behavior::deterministic(0, 1, 1, 0)] {
        cases.push(("behavior".into(), b.context_tables()));
    }
    for (name, tables) in cases {
        let (found, empty) = search_and_enumeration(&tables);
        assert_eq!(found, empty, "{name}");
    }
}

#[test]
fn pm_chain_needs_all_four_tables() {
    for (u, v) in PM_PAIRS {
        let t: Vec<CorrelationTable> = pm_tables().into_iter().filter(|t| t.variables != [u, v]).collect();
        assert_eq!(search_and_enumeration(&t), (false, false), "without ({u},{v})");
    }
    assert_eq!(search_and_enumeration(&pm_tables()), (true, true));
}
