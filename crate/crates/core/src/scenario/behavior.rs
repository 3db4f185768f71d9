use num_traits::{One, Zero};
use serde::Serialize;

use crate::qcore::Rational;

use super::catalogue::hardy;
use super::distribution::{event_distribution, CorrelationTable, TableEntry};
use super::model::{parse_assignment, Scenario};
use super::ScenarioError;

/// `p(a,b|x,y)` for two binary settings and two binary outcomes, exact.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Behavior {
    /// Outcome labels of `a` for `x = 0, 1`.
    pub a_labels: [[String; 2]; 2],
    /// Outcome labels of `b` for `y = 0, 1`.
    pub b_labels: [[String; 2]; 2],
    #[serde(serialize_with = "ser_probs")]
    p: Vec<Rational>,
}

fn ser_probs<S: serde::Serializer>(p: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(p.len()))?;
    for r in p {
        seq.serialize_element(&crate::qcore::format_rational(r))?;
    }
    seq.end()
}

fn idx(x: usize, y: usize, a: usize, b: usize) -> usize {
    ((x * 2 + y) * 2 + a) * 2 + b
}

fn bits() -> [[String; 2]; 2] {
    [["0".into(), "1".into()], ["0".into(), "1".into()]]
}

impl Behavior {
    /// `f(x, y, a, b)` gives each entry.
    pub fn from_fn(a_labels: [[String; 2]; 2], b_labels: [[String; 2]; 2], f: impl Fn(usize, usize, usize, usize) -> Rational) -> Self {
        let mut p = vec![Rational::zero(); 16];
        for x in 0..2 {
            for y in 0..2 {
                for a in 0..2 {
                    for b in 0..2 {
                        p[idx(x, y, a, b)] = f(x, y, a, b);
                    }
                }
            }
        }
        Behavior { a_labels, b_labels, p }
    }

    pub fn get(&self, x: usize, y: usize, a: usize, b: usize) -> &Rational {
        &self.p[idx(x, y, a, b)]
    }

    /// Reads the four `(a, b)` tables of a scenario with settings `x`, `y`
    /// valued `0`/`1`; every entry must snap.
    pub fn from_scenario(s: &Scenario, a: &str, b: &str) -> Result<Self, ScenarioError> {
        let mut a_labels = bits();
        let mut b_labels = bits();
        let mut p = vec![Rational::zero(); 16];
        for x in 0..2 {
            for y in 0..2 {
                let t = event_distribution(s, &parse_assignment(&format!("x={x},y={y}"))?, &[a, b])?;
                if t.labels[0].len() != 2 || t.labels[1].len() != 2 {
                    return Err(ScenarioError::InvalidParameter("behavior needs binary outcomes".into()));
                }
                a_labels[x] = [t.labels[0][0].clone(), t.labels[0][1].clone()];
                b_labels[y] = [t.labels[1][0].clone(), t.labels[1][1].clone()];
                for (k, e) in t.entries.iter().enumerate() {
                    p[idx(x, y, k / 2, k % 2)] = e.exact.clone().ok_or_else(|| {
                        ScenarioError::InvalidParameter(format!("p({}|x={x},y={y}) does not snap to a rational", e.outcome.join(",")))
                    })?;
                }
            }
        }
        Ok(Behavior { a_labels, b_labels, p })
    }

    /// Born behavior of the Hardy state (computational for setting 0, ± for 1).
    pub fn hardy() -> Self {
        Behavior::from_scenario(&hardy(), "a", "b").expect("hardy tables snap")
    }

    /// `a ⊕ b = x·y` with uniform marginals.
    pub fn pr_box() -> Self {
        let half = Rational::new(1.into(), 2.into());
        Behavior::from_fn(bits(), bits(), |x, y, a, b| if (a ^ b) == (x & y) { half.clone() } else { Rational::zero() })
    }

    /// `a = a_x`, `b = b_y` with certainty.
    pub fn deterministic(a0: usize, a1: usize, b0: usize, b1: usize) -> Self {
        let (av, bv) = ([a0, a1], [b0, b1]);
        Behavior::from_fn(bits(), bits(), |x, y, a, b| {
            if a == av[x] && b == bv[y] {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
    }

    /// Convex combination with the given weights; labels taken from the first.
    pub fn mixture(parts: &[(Rational, Behavior)]) -> Self {
        let first = &parts[0].1;
        Behavior::from_fn(first.a_labels.clone(), first.b_labels.clone(), |x, y, a, b| {
            parts.iter().fold(Rational::zero(), |acc, (w, beh)| acc + w * beh.get(x, y, a, b))
        })
    }

    pub fn is_normalized(&self) -> bool {
        (0..2).all(|x| {
            (0..2).all(|y| {
                let s = (0..4).fold(Rational::zero(), |acc, k| acc + self.get(x, y, k / 2, k % 2));
                s.is_one()
            })
        })
    }

    /// Alice's marginal independent of `y` and Bob's of `x`.
    pub fn is_no_signaling(&self) -> bool {
        let a_marg = |x: usize, y: usize, a: usize| self.get(x, y, a, 0) + self.get(x, y, a, 1);
        let b_marg = |x: usize, y: usize, b: usize| self.get(x, y, 0, b) + self.get(x, y, 1, b);
        (0..2).all(|x| (0..2).all(|a| a_marg(x, 0, a) == a_marg(x, 1, a)))
            && (0..2).all(|y| (0..2).all(|b| b_marg(0, y, b) == b_marg(1, y, b)))
    }

    /// One table per context over variables `a{x}`, `b{y}`.
    pub fn context_tables(&self) -> Vec<CorrelationTable> {
        let mut out = Vec::with_capacity(4);
        for x in 0..2 {
            for y in 0..2 {
                let labels = vec![self.a_labels[x].to_vec(), self.b_labels[y].to_vec()];
                let entries = (0..4)
                    .map(|k| {
                        let r = self.get(x, y, k / 2, k % 2).clone();
                        TableEntry {
                            outcome: vec![labels[0][k / 2].clone(), labels[1][k % 2].clone()],
                            probability: crate::qcore::rational_to_f64(&r),
                            exact: Some(r),
                        }
                    })
                    .collect();
                out.push(CorrelationTable {
                    variables: vec![format!("a{x}"), format!("b{y}")],
                    labels,
                    settings: parse_assignment(&format!("x={x},y={y}")).expect("literal assignment"),
                    entries,
                    accessibility: None,
                });
            }
        }
        out
    }
}
