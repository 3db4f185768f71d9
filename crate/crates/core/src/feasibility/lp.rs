//! Exact rational feasibility by phase-one simplex with Bland's rule.
//!
//! Infeasibility is certified by solving the Farkas alternative system with
//! the same solver, so both outcomes carry an exactly checkable object.

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::qcore::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Free,
    NonNegative,
    NonPositive,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Variable {
    pub name: String,
    pub bound: Bound,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Relation {
    #[serde(rename = "<=")]
    Le,
    #[serde(rename = ">=")]
    Ge,
    #[serde(rename = "=")]
    Eq,
}

/// `coefficients · x  relation  rhs`, with one coefficient per variable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Constraint {
    pub label: String,
    #[serde(with = "crate::fmt::rational_vec")]
    pub coefficients: Vec<Rational>,
    pub relation: Relation,
    #[serde(with = "crate::fmt::rational_str")]
    pub rhs: Rational,
}

/// A feasibility-only linear program.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct LinearProgram {
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

/// Multipliers, one per constraint, such that the combined inequality reads
/// `0 ≤ (yA)·x ≤ y·b = -1` for every `x` within the variable bounds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FarkasCertificate {
    #[serde(with = "crate::fmt::rational_vec")]
    pub multipliers: Vec<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum FeasibilityResult {
    Feasible {
        #[serde(with = "crate::fmt::rational_vec")]
        witness: Vec<Rational>,
    },
    Infeasible {
        certificate: FarkasCertificate,
    },
}

impl FeasibilityResult {
    pub fn is_feasible(&self) -> bool {
        matches!(self, FeasibilityResult::Feasible { .. })
    }

    pub fn witness(&self) -> Option<&[Rational]> {
        match self {
            FeasibilityResult::Feasible { witness } => Some(witness),
            FeasibilityResult::Infeasible { .. } => None,
        }
    }

    pub fn certificate(&self) -> Option<&FarkasCertificate> {
        match self {
            FeasibilityResult::Infeasible { certificate } => Some(certificate),
            FeasibilityResult::Feasible { .. } => None,
        }
    }
}

impl LinearProgram {
    pub fn new(variables: Vec<Variable>) -> Self {
        LinearProgram { variables, constraints: Vec::new() }
    }

    pub fn nonnegative(names: &[String]) -> Self {
        Self::new(names.iter().map(|n| Variable { name: n.clone(), bound: Bound::NonNegative }).collect())
    }

    pub fn add(&mut self, label: &str, coefficients: Vec<Rational>, relation: Relation, rhs: Rational) {
        assert_eq!(coefficients.len(), self.variables.len(), "one coefficient per variable");
        self.constraints.push(Constraint { label: label.into(), coefficients, relation, rhs });
    }

    fn in_bounds(&self, x: &[Rational]) -> bool {
        self.variables.iter().zip(x).all(|(v, xi)| match v.bound {
            Bound::Free => true,
            Bound::NonNegative => !xi.is_negative(),
            Bound::NonPositive => !xi.is_positive(),
        })
    }

    /// Exact substitution check.
    pub fn check_witness(&self, x: &[Rational]) -> bool {
        x.len() == self.variables.len()
            && self.in_bounds(x)
            && self.constraints.iter().all(|c| {
                let lhs: Rational = c.coefficients.iter().zip(x).map(|(a, b)| a * b).sum();
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                }
            })
    }

    /// Exact check of the Farkas combination.
    pub fn check_certificate(&self, cert: &FarkasCertificate) -> bool {
        let y = &cert.multipliers;
        if y.len() != self.constraints.len() {
            return false;
        }
        let signs_ok = self.constraints.iter().zip(y).all(|(c, yi)| match c.relation {
            Relation::Le => !yi.is_negative(),
            Relation::Ge => !yi.is_positive(),
            Relation::Eq => true,
        });
        let yb: Rational = self.constraints.iter().zip(y).map(|(c, yi)| yi * &c.rhs).sum();
        let columns_ok = self.variables.iter().enumerate().all(|(j, v)| {
            let col: Rational = self.constraints.iter().zip(y).map(|(c, yi)| yi * &c.coefficients[j]).sum();
            match v.bound {
                Bound::Free => col.is_zero(),
                Bound::NonNegative => !col.is_negative(),
                Bound::NonPositive => !col.is_positive(),
            }
        });
        signs_ok && columns_ok && yb.is_negative()
    }

    /// The system whose feasible points are Farkas certificates of `self`.
    fn alternative(&self) -> LinearProgram {
        let variables = self
            .constraints
            .iter()
            .map(|c| Variable {
                name: format!("y[{}]", c.label),
                bound: match c.relation {
                    Relation::Le => Bound::NonNegative,
                    Relation::Ge => Bound::NonPositive,
                    Relation::Eq => Bound::Free,
                },
            })
            .collect();
        let mut alt = LinearProgram::new(variables);
        for (j, v) in self.variables.iter().enumerate() {
            let coefficients = self.constraints.iter().map(|c| c.coefficients[j].clone()).collect();
            let relation = match v.bound {
                Bound::Free => Relation::Eq,
                Bound::NonNegative => Relation::Ge,
                Bound::NonPositive => Relation::Le,
            };
            alt.add(&format!("column {}", v.name), coefficients, relation, Rational::zero());
        }
        alt.add("y·b", self.constraints.iter().map(|c| c.rhs.clone()).collect(), Relation::Eq, -Rational::one());
        alt
    }
}

/// Decides feasibility exactly. The witness or certificate always passes
/// [`LinearProgram::check_witness`] / [`LinearProgram::check_certificate`].
pub fn lp_feasible(lp: &LinearProgram) -> FeasibilityResult {
    if let Some(witness) = solve(lp) {
        debug_assert!(lp.check_witness(&witness));
        return FeasibilityResult::Feasible { witness };
    }
    let multipliers = solve(&lp.alternative()).expect("Farkas alternative is feasible when the primal is not");
    let certificate = FarkasCertificate { multipliers };
    debug_assert!(lp.check_certificate(&certificate));
    FeasibilityResult::Infeasible { certificate }
}

/// Some feasible point, or `None`.
fn solve(lp: &LinearProgram) -> Option<Vec<Rational>> {
    // Standard-form columns: each variable maps to one or two nonnegative columns.
    let mut columns: Vec<(usize, bool)> = Vec::new();
    for (j, v) in lp.variables.iter().enumerate() {
        match v.bound {
            Bound::NonNegative => columns.push((j, false)),
            Bound::NonPositive => columns.push((j, true)),
            Bound::Free => {
                columns.push((j, false));
                columns.push((j, true));
            }
        }
    }
    let n_struct = columns.len();
    let n_slack = lp.constraints.iter().filter(|c| c.relation != Relation::Eq).count();
    let n = n_struct + n_slack;
    let mut rows: Vec<Vec<Rational>> = Vec::with_capacity(lp.constraints.len());
    let mut rhs: Vec<Rational> = Vec::with_capacity(lp.constraints.len());
    let mut slack = n_struct;
    for c in &lp.constraints {
        let mut row: Vec<Rational> = columns
            .iter()
            .map(|&(j, neg)| if neg { -c.coefficients[j].clone() } else { c.coefficients[j].clone() })
            .collect();
        row.resize(n, Rational::zero());
        match c.relation {
            Relation::Le => {
                row[slack] = Rational::one();
                slack += 1;
            }
            Relation::Ge => {
                row[slack] = -Rational::one();
                slack += 1;
            }
            Relation::Eq => {}
        }
        let mut b = c.rhs.clone();
        if b.is_negative() {
            row.iter_mut().for_each(|a| *a = -a.clone());
            b = -b;
        }
        rows.push(row);
        rhs.push(b);
    }
    let x = phase_one(rows, rhs, n)?;
    let mut out = vec![Rational::zero(); lp.variables.len()];
    for (k, &(j, neg)) in columns.iter().enumerate() {
        if neg {
            out[j] -= &x[k];
        } else {
            out[j] += &x[k];
        }
    }
    Some(out)
}

/// Finds `x ≥ 0` with `A x = b` (`b ≥ 0`) by minimizing the sum of artificials.
fn phase_one(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>, n: usize) -> Option<Vec<Rational>> {
    let m = a.len();
    let total = n + m;
    for (i, row) in a.iter_mut().enumerate() {
        row.resize(total, Rational::zero());
        row[n + i] = Rational::one();
    }
    let mut basis: Vec<usize> = (n..total).collect();
    // Reduced costs of the phase-one objective (sum of artificials).
    let mut cost: Vec<Rational> = (0..total)
        .map(|j| if j >= n { Rational::zero() } else { -a.iter().map(|r| r[j].clone()).sum::<Rational>() })
        .collect();
    let mut objective: Rational = b.iter().sum();
    while let Some(enter) = (0..total).find(|&j| cost[j].is_negative()) {
        let mut leave: Option<(usize, Rational)> = None;
        for i in 0..m {
            if a[i][enter].is_positive() {
                let ratio = &b[i] / &a[i][enter];
                let better = match &leave {
                    None => true,
                    Some((k, best)) => ratio < *best || (ratio == *best && basis[i] < basis[*k]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
        }
        let (r, _) = leave.expect("phase one is bounded below by zero");
        let pivot = a[r][enter].clone();
        a[r].iter_mut().for_each(|v| *v /= &pivot);
        b[r] /= &pivot;
        let pivot_row = a[r].clone();
        let pivot_rhs = b[r].clone();
        for i in 0..m {
            if i != r && !a[i][enter].is_zero() {
                let f = a[i][enter].clone();
                for (v, p) in a[i].iter_mut().zip(&pivot_row) {
                    if !p.is_zero() {
                        *v -= &f * p;
                    }
                }
                b[i] -= &f * &pivot_rhs;
            }
        }
        let f = cost[enter].clone();
        for (v, p) in cost.iter_mut().zip(&pivot_row) {
            if !p.is_zero() {
                *v -= &f * p;
            }
        }
        objective += &f * &pivot_rhs;
        basis[r] = enter;
    }
    if objective.is_positive() {
        return None;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &j) in basis.iter().enumerate() {
        if j < n {
            x[j] = b[i].clone();
        }
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(p: i64, d: i64) -> Rational {
        Rational::new(p.into(), d.into())
    }

    #[test]
    fn contradictory_bounds() {
        let mut lp = LinearProgram::new(vec![Variable { name: "x".into(), bound: Bound::Free }]);
        lp.add("x >= 0", vec![q(1, 1)], Relation::Ge, q(0, 1));
        lp.add("x <= -1", vec![q(1, 1)], Relation::Le, q(-1, 1));
        let r = lp_feasible(&lp);
        assert!(lp.check_certificate(r.certificate().unwrap()));
    }

    #[test]
    fn simplex_witness() {
        let mut lp = LinearProgram::nonnegative(&["x".into(), "y".into()]);
        lp.add("x + y = 1", vec![q(1, 1), q(1, 1)], Relation::Eq, q(1, 1));
        let r = lp_feasible(&lp);
        assert!(lp.check_witness(r.witness().unwrap()));
    }

    #[test]
    fn nonpositive_variable() {
        let mut lp = LinearProgram::new(vec![Variable { name: "z".into(), bound: Bound::NonPositive }]);
        lp.add("z = -3/2", vec![q(1, 1)], Relation::Eq, q(-3, 2));
        assert_eq!(lp_feasible(&lp).witness().unwrap(), &[q(-3, 2)]);
        lp.add("z >= 1", vec![q(1, 1)], Relation::Ge, q(1, 1));
        let r = lp_feasible(&lp);
        assert!(lp.check_certificate(r.certificate().unwrap()));
    }

    #[test]
    fn wrong_certificate_rejected() {
        let mut lp = LinearProgram::nonnegative(&["x".into()]);
        lp.add("x <= 1", vec![q(1, 1)], Relation::Le, q(1, 1));
        assert!(!lp.check_certificate(&FarkasCertificate { multipliers: vec![q(1, 1)] }));
        assert!(!lp.check_witness(&[q(2, 1)]));
    }

    #[test]
    fn json_uses_rational_strings() {
        let mut lp = LinearProgram::nonnegative(&["x".into()]);
        lp.add("half", vec![q(2, 1)], Relation::Eq, q(1, 1));
        let r = lp_feasible(&lp);
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(text, r#"{"status":"feasible","witness":["1/2"]}"#);
        let back: FeasibilityResult = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
        let lp_back: LinearProgram = serde_json::from_str(&serde_json::to_string(&lp).unwrap()).unwrap();
        assert_eq!(lp_back, lp);
    }
}
