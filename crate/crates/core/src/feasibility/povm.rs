//! Joint measurability of two projective qubit measurements.
//!
//! A joint POVM `E_{ij}` with `Σ_j E_{ij} = P_i` and `Σ_i E_{ij} = Q_j` is fixed
//! by `E_00`: `E_01 = P_0 - E_00`, `E_10 = Q_0 - E_00`,
//! `E_11 = I - P_0 - Q_0 + E_00`. The analytic criterion (feasible iff the
//! projectors commute) is cross-checked by maximizing the smallest eigenvalue
//! of the four effects over Hermitian `E_00`.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::par::Exec;
use crate::qcore::{Effect, Operator, ProjectiveBasis, C64, OPERATOR_TOL};

use super::FeasibilityError;

/// The numeric oracle calls a pair feasible when its optimum is at least `-ORACLE_TOL`.
pub const ORACLE_TOL: f64 = 1e-6;
/// Grid points per axis of `E_00 = [[t+z, x-iy], [x+iy, t-z]]` over `[-1, 1]^4`.
pub const GRID_POINTS: usize = 17;

#[derive(Debug, Clone, PartialEq)]
pub struct QubitMeasurementPair {
    pub first: ProjectiveBasis,
    pub second: ProjectiveBasis,
}

impl QubitMeasurementPair {
    pub fn new(first: ProjectiveBasis, second: ProjectiveBasis) -> Result<Self, FeasibilityError> {
        for b in [&first, &second] {
            if b.len() != 2 || b.kets().iter().any(|k| k.len() != 2) {
                return Err(FeasibilityError::NotQubit);
            }
        }
        Ok(QubitMeasurementPair { first, second })
    }
}

type M2 = [[C64; 2]; 2];

fn to_m2(m: &DMatrix<C64>) -> M2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

fn min_eigenvalue(m: &M2) -> f64 {
    let (a, d) = (m[0][0].re, m[1][1].re);
    let b = (m[0][1] + m[1][0].conj()) * 0.5;
    (a + d) / 2.0 - (((a - d) / 2.0).powi(2) + b.norm_sqr()).sqrt()
}

struct Objective {
    p0: M2,
    q0: M2,
}

impl Objective {
    fn effects(&self, v: &[f64; 4]) -> [M2; 4] {
        let [t, x, y, z] = *v;
        let e00 = [[C64::new(t + z, 0.0), C64::new(x, -y)], [C64::new(x, y), C64::new(t - z, 0.0)]];
        let mut e01 = self.p0;
        let mut e10 = self.q0;
        let mut e11 = [[C64::new(1.0, 0.0), C64::new(0.0, 0.0)], [C64::new(0.0, 0.0), C64::new(1.0, 0.0)]];
        for i in 0..2 {
            for j in 0..2 {
                e01[i][j] -= e00[i][j];
                e10[i][j] -= e00[i][j];
                e11[i][j] += e00[i][j] - self.p0[i][j] - self.q0[i][j];
            }
        }
        [e00, e01, e10, e11]
    }

    fn value(&self, v: &[f64; 4]) -> f64 {
        self.effects(v).iter().map(min_eigenvalue).fold(f64::INFINITY, f64::min)
    }
}

/// Best point found by the grid and pattern-search refinement.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleResult {
    pub max_min_eigenvalue: f64,
    /// `(t, x, y, z)` of the maximizing `E_00`.
    pub argmax: [f64; 4],
    pub feasible: bool,
}

fn oracle(obj: &Objective) -> OracleResult {
    let step = 2.0 / (GRID_POINTS - 1) as f64;
    let coord = |k: usize| -1.0 + step * k as f64;
    let mut best = ([0.0; 4], f64::NEG_INFINITY);
    for i in 0..GRID_POINTS {
        for j in 0..GRID_POINTS {
            for k in 0..GRID_POINTS {
                for l in 0..GRID_POINTS {
                    let v = [coord(i), coord(j), coord(k), coord(l)];
                    let f = obj.value(&v);
                    if f > best.1 {
                        best = (v, f);
                    }
                }
            }
        }
    }
    // Pattern search over all 80 directions in {-1, 0, 1}^4.
    let directions: Vec<[f64; 4]> = (0..81)
        .filter(|&n| n != 40)
        .map(|n| [(n % 3) as f64 - 1.0, ((n / 3) % 3) as f64 - 1.0, ((n / 9) % 3) as f64 - 1.0, ((n / 27) % 3) as f64 - 1.0])
        .collect();
    let (mut v, mut f) = best;
    let mut h = step;
    while h > 1e-13 {
        let mut moved = None;
        for d in &directions {
            let w = [v[0] + h * d[0], v[1] + h * d[1], v[2] + h * d[2], v[3] + h * d[3]];
            let fw = obj.value(&w);
            if fw > f + 1e-15 {
                f = fw;
                moved = Some(w);
            }
        }
        match moved {
            Some(w) => v = w,
            None => h /= 2.0,
        }
    }
    OracleResult { max_min_eigenvalue: f, argmax: v, feasible: f >= -ORACLE_TOL }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PovmResult {
    /// Analytic decision: the two measurements commute.
    pub feasible: bool,
    pub commutator_norm: f64,
    pub oracle: OracleResult,
    /// `E_{ij} = P_i Q_j` when feasible, row `i` for the first measurement.
    #[serde(skip)]
    pub witness: Option<[[Effect; 2]; 2]>,
}

impl PovmResult {
    pub fn methods_agree(&self) -> bool {
        self.feasible == self.oracle.feasible
    }
}

pub fn povm_joint_feasibility(pair: &QubitMeasurementPair) -> Result<PovmResult, FeasibilityError> {
    let p: Vec<DMatrix<C64>> = (0..2).map(|i| pair.first.projector(i)).collect();
    let q: Vec<DMatrix<C64>> = (0..2).map(|j| pair.second.projector(j)).collect();
    let comm = &p[0] * &q[0] - &q[0] * &p[0];
    let commutator_norm = comm.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let feasible = commutator_norm <= OPERATOR_TOL;
    let witness = if feasible {
        let reg = vec!["S".to_string()];
        let effect = |i: usize, j: usize| -> Result<Effect, FeasibilityError> {
            let m = (&p[i] * &q[j] + &q[j] * &p[i]) * C64::new(0.5, 0.0);
            Ok(Effect::new(Operator::new(m, reg.clone())?)?)
        };
        Some([[effect(0, 0)?, effect(0, 1)?], [effect(1, 0)?, effect(1, 1)?]])
    } else {
        None
    };
    let oracle = oracle(&Objective { p0: to_m2(&p[0]), q0: to_m2(&q[0]) });
    Ok(PovmResult { feasible, commutator_norm, oracle, witness })
}

/// Runs [`povm_joint_feasibility`] on each pair, in input order.
pub fn povm_sweep(pairs: &[QubitMeasurementPair], exec: Exec) -> Result<Vec<PovmResult>, FeasibilityError> {
    exec.map(pairs.iter().collect(), povm_joint_feasibility).into_iter().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(a: ProjectiveBasis, b: ProjectiveBasis) -> QubitMeasurementPair {
        QubitMeasurementPair::new(a, b).unwrap()
    }

    #[test]
    fn complementary_pair_is_not_jointly_measurable() {
        let r = povm_joint_feasibility(&pair(ProjectiveBasis::computational(), ProjectiveBasis::plus_minus())).unwrap();
        assert!(!r.feasible && !r.oracle.feasible && r.witness.is_none());
    }

    #[test]
    fn equal_and_relabelled_pairs_are_feasible() {
        let c = ProjectiveBasis::computational();
        for second in [c.clone(), c.relabeled_swapped()] {
            let r = povm_joint_feasibility(&pair(c.clone(), second.clone())).unwrap();
            assert!(r.feasible && r.methods_agree(), "{:?}", r.oracle);
            let w = r.witness.unwrap();
            for (i, effects) in w.iter().enumerate() {
                let row = effects[0].matrix() + effects[1].matrix();
                assert!((row - c.projector(i)).iter().all(|z| z.norm() < 1e-12));
                let col = w[0][i].matrix() + w[1][i].matrix();
                assert!((col - second.projector(i)).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }
}
