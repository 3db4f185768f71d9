//! Values recomputed here from scratch and compared with the library.

use ewf_core::feasibility::{guerin_marginal_check, povm_joint_feasibility, povm_sweep, QubitMeasurementPair};
use ewf_core::qcore::random::{random_basis, random_density};
use ewf_core::qcore::{
    born_probability, cnot, kets, DensityOperator, Effect, ProjectiveBasis, Rational, Register, C64,
};
use ewf_core::scenario::{event_distribution, gao_run, lookup, parse_assignment, Foliation, GaoPolicy};
use ewf_core::Exec;
use nalgebra::{DMatrix, DVector};
use num_traits::{One, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `(1 - √2) / 4`: best smallest eigenvalue of a joint POVM for the computational and ± bases.
const COMPLEMENTARY_OPTIMUM: f64 = -0.10355339059327377;

fn h() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

#[test]
fn hardy_table_matches_brute_force_born_rule() {
    let psi = [1.0, 1.0, 1.0, 0.0].map(|a: f64| a / 3f64.sqrt());
    // setting 0: computational, setting 1: ±
    let bases = [[[1.0, 0.0], [0.0, 1.0]], [[h(), h()], [h(), -h()]]];
    let s = lookup("hardy").unwrap();
    for x in 0..2 {
        for y in 0..2 {
            let t = event_distribution(&s, &parse_assignment(&format!("x={x},y={y}")).unwrap(), &["a", "b"]).unwrap();
            for (k, e) in t.entries.iter().enumerate() {
                let (ka, kb) = (bases[x][k / 2], bases[y][k % 2]);
                let amp: f64 = (0..4).map(|i| ka[i >> 1] * kb[i & 1] * psi[i]).sum();
                assert!((e.probability - amp * amp).abs() < 1e-12, "x={x} y={y} {:?}", e.outcome);
            }
        }
    }
}

#[test]
fn hardy_zeros_are_exact() {
    let s = lookup("hardy").unwrap();
    let at = |x: &str, y: &str| event_distribution(&s, &parse_assignment(&format!("x={x},y={y}")).unwrap(), &["a", "b"]).unwrap();
    assert!(at("0", "0").exact(&["1", "1"]).unwrap().is_zero());
    assert!(at("0", "1").exact(&["0", "-"]).unwrap().is_zero());
    assert!(at("1", "0").exact(&["-", "0"]).unwrap().is_zero());
    assert_eq!(at("1", "1").exact(&["-", "-"]), Some(&Rational::new(1.into(), 12.into())));
}

#[test]
fn friend_record_plus_state_is_phi_plus_projection() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let ready = DensityOperator::new(
        DMatrix::from_fn(2, 2, |i, j| if i == 0 && j == 0 { C64::one() } else { C64::zero() }),
        vec![Register::memory("F", "Friend")],
    )
    .unwrap();
    let phi = Effect::projector(&DVector::from_vec(kets::phi_plus()), vec!["S".into(), "F".into()]).unwrap();
    let plus = Effect::projector(&DVector::from_vec(kets::plus()), vec!["S".into()]).unwrap();
    for _ in 0..100 {
        let rho = random_density(&mut rng, "S");
        let rho_sf = rho.tensor(&ready).unwrap().evolve(&cnot("S", "F")).unwrap();
        let lhs = born_probability(&rho_sf, std::slice::from_ref(&phi)).unwrap();
        let rhs = born_probability(&rho, std::slice::from_ref(&plus)).unwrap();
        assert!((lhs - rhs).abs() <= 1e-12);
    }
}

fn min_eig(m: [[C64; 2]; 2]) -> f64 {
    let (a, d) = (m[0][0].re, m[1][1].re);
    a.min(d).min((a + d) / 2.0 - (((a - d) / 2.0).powi(2) + m[0][1].norm_sqr()).sqrt())
}

/// Smallest eigenvalue among the four effects fixed by a real symmetric `E00 = [[p, q], [q, r]]`
/// with marginals `|0⟩⟨0|` and `|+⟩⟨+|`.
fn complementary_objective(p: f64, q: f64, r: f64) -> f64 {
    let c = |x: f64| C64::new(x, 0.0);
    let e00 = [[c(p), c(q)], [c(q), c(r)]];
    let e01 = [[c(1.0 - p), c(-q)], [c(-q), c(-r)]];
    let e10 = [[c(0.5 - p), c(0.5 - q)], [c(0.5 - q), c(0.5 - r)]];
    let e11 = [[c(p - 0.5), c(q - 0.5)], [c(q - 0.5), c(r + 0.5)]];
    [e00, e01, e10, e11].into_iter().map(min_eig).fold(f64::INFINITY, f64::min)
}

#[test]
fn independent_oracle_freezes_the_complementary_optimum() {
    // Coarse 3-parameter grid, then repeated zooming around the best point.
    let (mut best, mut f) = ([0.0; 3], f64::NEG_INFINITY);
    let n = 41;
    let (mut lo, mut width) = ([-1.0; 3], 2.0);
    for _ in 0..40 {
        let step = width / (n - 1) as f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let v = [lo[0] + step * i as f64, lo[1] + step * j as f64, lo[2] + step * k as f64];
                    let g = complementary_objective(v[0], v[1], v[2]);
                    if g > f {
                        (best, f) = (v, g);
                    }
                }
            }
        }
        width = 4.0 * step;
        lo = best.map(|b| b - width / 2.0);
    }
    assert!((f - COMPLEMENTARY_OPTIMUM).abs() < 1e-9, "{f}");
    assert!((COMPLEMENTARY_OPTIMUM - (1.0 - 2f64.sqrt()) / 4.0).abs() < 1e-15);
    let lib = povm_joint_feasibility(&QubitMeasurementPair::new(ProjectiveBasis::computational(), ProjectiveBasis::plus_minus()).unwrap())
        .unwrap();
    assert!((lib.oracle.max_min_eigenvalue - COMPLEMENTARY_OPTIMUM).abs() < 1e-9);
    assert!(!lib.feasible && !lib.oracle.feasible);
}

#[test]
fn povm_methods_agree_on_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let pairs: Vec<QubitMeasurementPair> = (0..200)
        .map(|i| {
            let a = random_basis(&mut rng);
            let b = match i % 4 {
                0 => a.clone(),
                1 => a.relabeled_swapped(),
                _ => random_basis(&mut rng),
            };
            QubitMeasurementPair::new(a, b).unwrap()
        })
        .collect();
    let results = povm_sweep(&pairs, Exec::Parallel).unwrap();
    assert!(results.iter().all(|r| r.methods_agree()));
    assert_eq!(results.iter().filter(|r| r.feasible).count(), 100);
    for (pair, r) in pairs.iter().zip(&results).filter(|(_, r)| r.feasible) {
        let w = r.witness.as_ref().unwrap();
        for (i, effects) in w.iter().enumerate() {
            let row = effects[0].matrix() + effects[1].matrix();
            let col = w[0][i].matrix() + w[1][i].matrix();
            assert!((row - pair.first.projector(i)).iter().all(|z| z.norm() < 1e-10));
            assert!((col - pair.second.projector(i)).iter().all(|z| z.norm() < 1e-10));
        }
    }
}

#[test]
fn guerin_circuit_matches_closed_forms() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let rho = random_density(&mut rng, "S");
        let m = rho.matrix();
        let p0 = m[(0, 0)].re;
        let plus = (m[(0, 0)].re + m[(1, 1)].re) / 2.0 + m[(0, 1)].re;
        let r = guerin_marginal_check(&rho).unwrap();
        assert!(r.holds && r.max_deviation <= 1e-12);
        assert!((r.f1[0] - p0).abs() <= 1e-12 && (r.f1[1] - (1.0 - p0)).abs() <= 1e-12);
        assert!((r.f2[0] - plus).abs() <= 1e-12 && (r.f2[1] - (1.0 - plus)).abs() <= 1e-12);
    }
}

#[test]
fn guerin_eigenstate_inputs() {
    let pure = |k: Vec<C64>| {
        let v = DVector::from_vec(k);
        DensityOperator::new(&v * v.adjoint(), vec![Register::system("S")]).unwrap()
    };
    let r = guerin_marginal_check(&pure(kets::zero())).unwrap();
    assert!((r.f1[0] - 1.0).abs() < 1e-12 && (r.f2[0] - 0.5).abs() < 1e-12);
    let r = guerin_marginal_check(&pure(kets::plus())).unwrap();
    assert!((r.f1[0] - 0.5).abs() < 1e-12 && (r.f2[0] - 1.0).abs() < 1e-12);
}

#[test]
fn collapse_ordered_gao_is_exactly_anticorrelated() {
    for k in 1..=3 {
        for f in [Foliation::DebbieFirst, Foliation::DebbieLast] {
            let run = gao_run(GaoPolicy::CollapseOrdered(f), k, 500, 3, Exec::Sequential).unwrap();
            let exact = run.exact.as_ref().unwrap();
            let mass = exact
                .entries
                .iter()
                .filter(|e| e.outcome[..k].iter().all(|c| c == &e.outcome[0]) && e.outcome[0] != e.outcome[k])
                .fold(Rational::zero(), |acc, e| acc + e.exact.clone().unwrap());
            assert!(mass.is_one(), "k={k} {}", f.name());
            assert_eq!(run.all_equal_opposite_d(), 1.0);
        }
    }
}

#[test]
fn independent_born_gao_breaks_anticorrelation() {
    for k in 1..=3 {
        let run = gao_run(GaoPolicy::IndependentBorn, k, 10_000, 42, Exec::Parallel).unwrap();
        assert!((run.last_differs_from_d() - 0.5).abs() <= 0.02, "k={k}: {}", run.last_differs_from_d());
    }
}
