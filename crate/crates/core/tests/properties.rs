use std::collections::BTreeSet;

use ewf_core::epistemic::{infer_fixpoint, seed_knowledge, CutTable, EngineConfig, Protocol, Rule};
use ewf_core::feasibility::{lp_feasible, Bound, LinearProgram, Relation, Variable};
use ewf_core::possibilistic::{extract_implications, find_contradiction};
use ewf_core::qcore::random::{random_basis, random_density};
use ewf_core::qcore::{
    born_probability, isometry_equivalence_check, measurement_dilation, DensityOperator, Effect, Rational, Register,
    StateVector, Unitary, C64,
};
use ewf_core::scenario::{compile, event_distribution, lookup, Assignment, CorrelationTable, Scenario};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_ket(seed: u64, qubits: usize) -> Vec<C64> {
    use rand_distr::{Distribution, StandardNormal};
    let mut r = rng(seed);
    let v: Vec<C64> =
        (0..1 << qubits).map(|_| C64::new(StandardNormal.sample(&mut r), StandardNormal.sample(&mut r))).collect();
    let n = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.into_iter().map(|z| z / n).collect()
}

fn max_dev(m: &DMatrix<C64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

fn sf() -> Vec<Register> {
    vec![Register::system("S"), Register::memory("F", "friend")]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn composed_and_tensored_basis_rotations_stay_unitary(a in any::<u64>(), b in any::<u64>()) {
        let ua = Unitary::from_matrix(random_basis(&mut rng(a)).change_of_basis(), vec!["S".into()]).unwrap();
        let ub = Unitary::from_matrix(random_basis(&mut rng(b)).change_of_basis(), vec!["S".into()]).unwrap();
        let uc = Unitary::from_matrix(random_basis(&mut rng(b ^ 1)).change_of_basis(), vec!["F".into()]).unwrap();
        for u in [ua.compose(&ub).unwrap(), ua.tensor(&uc).unwrap(), ua.compose(&uc).unwrap()] {
            let m = u.matrix();
            let dim = m.nrows();
            prop_assert!(max_dev(&(m * m.adjoint() - DMatrix::identity(dim, dim))) < 1e-12);
        }
    }

    #[test]
    fn dilation_records_born_statistics(seed in any::<u64>()) {
        let basis = random_basis(&mut rng(seed));
        let psi = random_ket(seed ^ 0x5eed, 1);
        let input = StateVector::new(vec![psi[0], C64::new(0.0, 0.0), psi[1], C64::new(0.0, 0.0)], sf()).unwrap();
        let out = input.evolve(&measurement_dilation(&basis, "S", "F").unwrap()).unwrap();
        for k in 0..2 {
            let mut ket = vec![C64::new(0.0, 0.0); 2];
            ket[k] = C64::new(1.0, 0.0);
            let record = Effect::projector(&DVector::from_vec(ket), vec!["F".into()]).unwrap();
            let born = basis.kets()[k].dotc(&DVector::from_vec(psi.clone())).norm_sqr();
            prop_assert!((born_probability(&out, &[record]).unwrap() - born).abs() < 1e-12);
        }
    }

    #[test]
    fn undo_restores_the_state(seed in any::<u64>()) {
        let basis = random_basis(&mut rng(seed));
        let u = measurement_dilation(&basis, "S", "F").unwrap();
        let psi = StateVector::new(random_ket(seed, 2), sf()).unwrap();
        let back = psi.evolve(&u).unwrap().evolve(&u.adjoint()).unwrap();
        prop_assert!(back.distance_up_to_phase(&psi) < 1e-12);
        let twice = psi.evolve(&u).unwrap().evolve(&u).unwrap();
        prop_assert!(twice.distance_up_to_phase(&psi) < 1e-12);
    }

    #[test]
    fn pushed_projectors_match_direct_born_rule(seed in any::<u64>()) {
        let mut r = rng(seed);
        let rho = random_density(&mut r, "S");
        let basis = random_basis(&mut r);
        prop_assert!(isometry_equivalence_check(&rho, &basis).unwrap() <= 1e-12);
    }

    #[test]
    fn marginal_of_latest_variable_drops_out(
        scenario in prop::sample::select(vec!["brukner_lf", "pusey_masanes_fr", "hardy", "guerin_modified"]),
        settings in any::<u64>(),
        pick in any::<u64>(),
    ) {
        let s = lookup(scenario).unwrap();
        let all = s.all_assignments();
        let a = &all[(settings % all.len() as u64) as usize];
        let ordered = realized_in_circuit_order(&s, a);
        let chosen: Vec<&str> = ordered
            .iter()
            .enumerate()
            .filter(|(i, _)| pick >> i & 1 == 1)
            .map(|(_, v)| v.as_str())
            .collect();
        prop_assume!(chosen.len() >= 2);
        let full = event_distribution(&s, a, &chosen).unwrap();
        prop_assert!((full.total() - 1.0).abs() < 1e-12);
        let prefix = &chosen[..chosen.len() - 1];
        let dropped = full.marginal(prefix).unwrap();
        let direct = event_distribution(&s, a, prefix).unwrap();
        for (x, y) in dropped.entries.iter().zip(&direct.entries) {
            prop_assert_eq!(&x.outcome, &y.outcome);
            prop_assert!((x.probability - y.probability).abs() < 1e-12);
        }
    }

    #[test]
    fn adding_tables_never_removes_a_contradiction(mask in 0u8..16, extra in 0u8..16) {
        let tables = pm_tables();
        let pick = |m: u8| -> Vec<CorrelationTable> {
            tables.iter().enumerate().filter(|(i, _)| m >> i & 1 == 1).map(|(_, t)| t.clone()).collect()
        };
        let small = find_contradiction(&extract_implications(&pick(mask)).unwrap()).is_some();
        let large = find_contradiction(&extract_implications(&pick(mask | extra)).unwrap()).is_some();
        prop_assert!(!small || large);
        prop_assert_eq!(find_contradiction(&extract_implications(&pick(mask)).unwrap()).is_some(), mask == 15);
    }

    #[test]
    fn fixpoint_is_independent_of_rule_order(order in Just(Rule::ALL.to_vec()).prop_shuffle()) {
        let s = lookup("pusey_masanes_fr").unwrap();
        let cuts = CutTable::frauchiger_renner();
        let seeds = seed_knowledge(&s, &cuts, &Protocol::frauchiger_renner()).unwrap();
        let base = infer_fixpoint(&seeds, &cuts, &EngineConfig::default()).unwrap();
        let config = EngineConfig { rules: order, ..Default::default() };
        let shuffled = infer_fixpoint(&seeds, &cuts, &config).unwrap();
        prop_assert_eq!(base.statements(), shuffled.statements());
        shuffled.replay(&cuts, &config).unwrap();
    }

    #[test]
    fn lp_results_verify_exactly(
        rows in prop::collection::vec((prop::collection::vec(-3i64..=3, 3), 0u8..3, -4i64..=4), 1..5),
        bounds in prop::collection::vec(0u8..3, 3),
    ) {
        let variables = bounds
            .iter()
            .enumerate()
            .map(|(i, b)| Variable {
                name: format!("x{i}"),
                bound: match b { 0 => Bound::Free, 1 => Bound::NonNegative, _ => Bound::NonPositive },
            })
            .collect();
        let mut lp = LinearProgram::new(variables);
        for (i, (coef, rel, rhs)) in rows.iter().enumerate() {
            let relation = match rel { 0 => Relation::Le, 1 => Relation::Ge, _ => Relation::Eq };
            let coefficients = coef.iter().map(|&c| Rational::from_integer(c.into())).collect();
            lp.add(&format!("r{i}"), coefficients, relation, Rational::from_integer((*rhs).into()));
        }
        let result = lp_feasible(&lp);
        match (result.witness(), result.certificate()) {
            (Some(w), None) => prop_assert!(lp.check_witness(w)),
            (None, Some(c)) => prop_assert!(lp.check_certificate(c)),
            _ => prop_assert!(false, "result carries neither witness nor certificate"),
        }
    }
}

fn pm_tables() -> Vec<CorrelationTable> {
    let s = lookup("pusey_masanes_fr").unwrap();
    [("c", "d"), ("c", "b"), ("a", "d"), ("a", "b")]
        .iter()
        .map(|(u, v)| event_distribution(&s, &Assignment::new(), &[u, v]).unwrap())
        .collect()
}

/// Variables realized under `a`, sorted by the circuit position of their event.
fn realized_in_circuit_order(s: &Scenario, a: &Assignment) -> Vec<String> {
    let circuit = compile(s, a).unwrap();
    let mut found: Vec<(usize, String)> = Vec::new();
    for v in &s.outcomes {
        let hits: BTreeSet<usize> = v.bindings.iter().filter_map(|b| circuit.position(b)).collect();
        if hits.len() == 1 {
            found.push((*hits.first().unwrap(), v.name.clone()));
        }
    }
    found.sort();
    found.into_iter().map(|(_, v)| v).collect()
}

#[test]
fn density_input_matches_pure_input() {
    let psi = random_ket(11, 1);
    let v = DVector::from_vec(psi.clone());
    let rho = DensityOperator::new(&v * v.adjoint(), vec![Register::system("S")]).unwrap();
    let pure = StateVector::new(psi, vec![Register::system("S")]).unwrap();
    let e = Effect::projector(&DVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.0, 0.0)]), vec!["S".into()]).unwrap();
    assert!((born_probability(&rho, std::slice::from_ref(&e)).unwrap() - born_probability(&pure, &[e]).unwrap()).abs() < 1e-12);
}
