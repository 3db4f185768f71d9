use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::par::Exec;

use super::catalogue::{gao, Foliation};
use super::distribution::{event_distribution, CorrelationTable};
use super::model::Assignment;
use super::ScenarioError;

/// Trials per independently seeded RNG stream.
pub const CHUNK: usize = 1024;

/// How outcome frequencies are predicted for the sequential scenario.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GaoPolicy {
    /// Projection at every measurement in the foliation's time order; an undo
    /// acts on the collapsed state.
    CollapseOrdered(#[serde(serialize_with = "ser_foliation")] Foliation),
    /// Every outcome drawn independently from its own Born marginal.
    IndependentBorn,
}

fn ser_foliation<S: serde::Serializer>(f: &Foliation, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(f.name())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaoRun {
    pub policy: GaoPolicy,
    pub k: usize,
    pub trials: u64,
    pub seed: u64,
    /// `c1..ck, d`.
    pub variables: Vec<String>,
    /// One count per joint outcome, lexicographic in `variables`.
    pub counts: Vec<(Vec<String>, u64)>,
    /// Exact joint law, for the collapse-ordered policy.
    pub exact: Option<CorrelationTable>,
}

impl GaoRun {
    pub fn empirical(&self, pred: impl Fn(&[String]) -> bool) -> f64 {
        let hits: u64 = self.counts.iter().filter(|(o, _)| pred(o)).map(|(_, n)| n).sum();
        hits as f64 / self.trials as f64
    }

    /// Empirical `p(c_k ≠ d)`.
    pub fn last_differs_from_d(&self) -> f64 {
        self.empirical(|o| o[self.k - 1] != o[self.k])
    }

    /// Empirical `p(c_1 = … = c_k ≠ d)`.
    pub fn all_equal_opposite_d(&self) -> f64 {
        self.empirical(|o| o[..self.k].iter().all(|c| c == &o[0]) && o[0] != o[self.k])
    }
}

fn sample_index<R: Rng>(rng: &mut R, cdf: &[f64]) -> usize {
    let u: f64 = rng.random();
    cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1)
}

fn cumulative(p: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut acc = 0.0;
    p.map(|x| {
        acc += x;
        acc
    })
    .collect()
}

/// Simulates `trials` runs under `policy`. Chunk `i` of 1024 trials draws from
/// ChaCha8 stream `i` of `seed`, so parallel and sequential runs agree.
pub fn gao_run(policy: GaoPolicy, k: usize, trials: u64, seed: u64, exec: Exec) -> Result<GaoRun, ScenarioError> {
    if trials == 0 {
        return Err(ScenarioError::ZeroTrials);
    }
    let foliation = match policy {
        GaoPolicy::CollapseOrdered(f) => f,
        GaoPolicy::IndependentBorn => Foliation::DebbieFirst,
    };
    let s = gao(k, foliation)?;
    let names = s.variable_names();
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let none = Assignment::new();
    let joint = event_distribution(&s, &none, &vars)?;
    let grid: Vec<Vec<String>> = joint.entries.iter().map(|e| e.outcome.clone()).collect();

    let (exact, marginals) = match policy {
        GaoPolicy::CollapseOrdered(_) => (Some(joint.clone()), Vec::new()),
        GaoPolicy::IndependentBorn => {
            let m: Vec<CorrelationTable> =
                vars.iter().map(|v| event_distribution(&s, &none, &[v])).collect::<Result<_, _>>()?;
            (None, m)
        }
    };
    let joint_cdf = cumulative(joint.entries.iter().map(|e| e.probability));
    let marginal_cdfs: Vec<Vec<f64>> =
        marginals.iter().map(|m| cumulative(m.entries.iter().map(|e| e.probability))).collect();
    let radix: Vec<usize> = joint.labels.iter().map(Vec::len).collect();

    let chunks = trials.div_ceil(CHUNK as u64) as usize;
    let per_chunk = exec.map_range(chunks, |c| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c as u64);
        let n = if c + 1 == chunks { trials - (c as u64) * CHUNK as u64 } else { CHUNK as u64 };
        let mut counts = vec![0u64; grid.len()];
        for _ in 0..n {
            let idx = if marginal_cdfs.is_empty() {
                sample_index(&mut rng, &joint_cdf)
            } else {
                marginal_cdfs
                    .iter()
                    .zip(&radix)
                    .fold(0, |acc, (cdf, r)| acc * r + sample_index(&mut rng, cdf))
            };
            counts[idx] += 1;
        }
        counts
    });
    let mut totals = vec![0u64; grid.len()];
    for chunk in per_chunk {
        for (t, c) in totals.iter_mut().zip(chunk) {
            *t += c;
        }
    }
    Ok(GaoRun {
        policy,
        k,
        trials,
        seed,
        variables: names,
        counts: grid.into_iter().zip(totals).collect(),
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_trials_rejected() {
        assert_eq!(
            gao_run(GaoPolicy::IndependentBorn, 1, 0, 1, Exec::Sequential),
            Err(ScenarioError::ZeroTrials)
        );
    }

    #[test]
    fn parallel_matches_sequential() {
        let p = GaoPolicy::CollapseOrdered(Foliation::DebbieLast);
        let a = gao_run(p, 2, 5000, 9, Exec::Parallel).unwrap();
        let b = gao_run(p, 2, 5000, 9, Exec::Sequential).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.counts.iter().map(|(_, n)| n).sum::<u64>(), 5000);
    }

    #[test]
    fn collapse_ordered_always_anticorrelated() {
        let r = gao_run(GaoPolicy::CollapseOrdered(Foliation::DebbieFirst), 3, 2000, 1, Exec::Sequential).unwrap();
        assert_eq!(r.all_equal_opposite_d(), 1.0);
    }
}
