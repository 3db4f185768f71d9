use serde::Serialize;

use crate::qcore::{snap_probability, Rational, C64};

use super::catalogue::wigner_stalkee;
use super::distribution::event_distribution;
use super::model::{Assignment, ComplexPair, EventKind, StateSpec};
use super::ScenarioError;

/// Probability of Wigner's `φ⁺` outcome as predicted by Wigner (no collapse)
/// and by the friend (collapse at the friend's measurement).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StalkeePredictions {
    pub wigner: f64,
    pub friend: f64,
    #[serde(serialize_with = "crate::fmt::serialize_opt_rational")]
    pub wigner_exact: Option<Rational>,
    #[serde(serialize_with = "crate::fmt::serialize_opt_rational")]
    pub friend_exact: Option<Rational>,
}

pub fn stalkee_predictions() -> Result<StalkeePredictions, ScenarioError> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    stalkee_predictions_for(&[C64::new(h, 0.0), C64::new(h, 0.0)])
}

/// Same comparison with the system prepared in `input` instead of `|+⟩`.
pub fn stalkee_predictions_for(input: &[C64]) -> Result<StalkeePredictions, ScenarioError> {
    let mut s = wigner_stalkee();
    for e in &mut s.events {
        if let EventKind::Prepare { state, .. } = &mut e.kind {
            *state = StateSpec::Amplitudes(input.iter().map(|z| -> ComplexPair { [z.re, z.im] }).collect());
        }
    }
    let none = Assignment::new();
    let wigner = event_distribution(&s, &none, &["w"])?
        .probability(&["phi+"])
        .expect("bell readout has a phi+ outcome");
    let friend = event_distribution(&s, &none, &["f", "w"])?
        .marginal(&["w"])?
        .probability(&["phi+"])
        .expect("bell readout has a phi+ outcome");
    Ok(StalkeePredictions {
        wigner,
        friend,
        wigner_exact: snap_probability(wigner),
        friend_exact: snap_probability(friend),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(p: i64, q: i64) -> Rational {
        Rational::new(p.into(), q.into())
    }

    #[test]
    fn default_input_splits() {
        let p = stalkee_predictions().unwrap();
        assert_eq!(p.wigner_exact, Some(r(1, 1)));
        assert_eq!(p.friend_exact, Some(r(1, 2)));
    }

    #[test]
    fn eigenstate_input_agrees() {
        let p = stalkee_predictions_for(&[C64::new(1.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert_eq!(p.wigner_exact, p.friend_exact);
        assert_eq!(p.wigner_exact, Some(r(1, 2)));
    }
}
