use serde::Serialize;

use super::compile::compile;
use super::distribution::realized_binding;
use super::model::{Assignment, EventKind, Scenario};
use super::ScenarioError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", content = "reason", rename_all = "snake_case")]
pub enum Accessibility {
    Accessible,
    Inaccessible(String),
}

impl Accessibility {
    pub fn is_accessible(&self) -> bool {
        matches!(self, Accessibility::Accessible)
    }
}

/// Where and when a variable's record exists: `[created, erased)` at `site`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RecordLifetime {
    pub variable: String,
    pub event: String,
    pub site: String,
    pub created: i64,
    pub erased: Option<i64>,
}

impl RecordLifetime {
    pub fn of(s: &Scenario, assignment: &Assignment, variable: &str) -> Result<RecordLifetime, ScenarioError> {
        let id = realized_binding(s, assignment, variable)?;
        let e = s.event(&id).ok_or_else(|| ScenarioError::UnknownEvent(id.clone()))?;
        let mut erased = None;
        if let EventKind::FriendMeasure { .. } = e.kind {
            let circuit = compile(s, assignment)?;
            let start = circuit.position(&id).unwrap_or(0);
            erased = circuit.events[start..]
                .iter()
                .filter(|c| c.kind == "undo")
                .find(|c| matches!(&s.events[c.index].kind, EventKind::Undo { target, .. } if target == &id))
                .map(|c| c.time);
        }
        Ok(RecordLifetime { variable: variable.to_string(), event: id, site: e.site.clone(), created: e.time, erased })
    }

    fn alive_until(&self) -> i64 {
        self.erased.unwrap_or(i64::MAX)
    }
}

/// Accessible iff some site hears of both records, under the signal delay,
/// strictly before either is erased.
pub fn classify_accessibility(s: &Scenario, assignment: &Assignment, u: &str, v: &str) -> Result<Accessibility, ScenarioError> {
    let ru = RecordLifetime::of(s, assignment, u)?;
    let rv = RecordLifetime::of(s, assignment, v)?;
    let delay = s.timing.signal_delay;
    let dist = |a: &str, b: &str| if a == b { 0 } else { delay };
    let mut sites: Vec<&str> = s.events.iter().map(|e| e.site.as_str()).collect();
    sites.sort_unstable();
    sites.dedup();
    let deadline = ru.alive_until().min(rv.alive_until());
    for site in sites {
        let meet = (ru.created + dist(&ru.site, site)).max(rv.created + dist(&rv.site, site));
        if meet < deadline {
            return Ok(Accessibility::Accessible);
        }
    }
    let reason = if ru.alive_until() <= rv.created {
        format!("record of {u} erased before {v} created")
    } else if rv.alive_until() <= ru.created {
        format!("record of {v} erased before {u} created")
    } else {
        format!("records of {u} and {v} cannot reach a common site before one is erased")
    };
    Ok(Accessibility::Inaccessible(reason))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::lookup;

    #[test]
    fn figure_timing_classification() {
        let s = lookup("pusey_masanes_fr").unwrap();
        let a = Assignment::new();
        assert_eq!(
            classify_accessibility(&s, &a, "c", "b").unwrap(),
            Accessibility::Inaccessible("record of c erased before b created".into())
        );
        for (u, v) in [("c", "d"), ("a", "d"), ("a", "b")] {
            assert!(classify_accessibility(&s, &a, u, v).unwrap().is_accessible(), "{u},{v}");
        }
    }

    #[test]
    fn mirror_timing_hides_a_d() {
        let s = lookup("pusey_masanes_fr(mirror)").unwrap();
        let a = Assignment::new();
        assert!(!classify_accessibility(&s, &a, "a", "d").unwrap().is_accessible());
        assert!(classify_accessibility(&s, &a, "c", "b").unwrap().is_accessible());
    }
}
