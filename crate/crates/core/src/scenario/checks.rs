use serde::Serialize;

use super::compile::{compile, is_realized};
use super::distribution::{event_distribution, CorrelationTable};
use super::model::{parse_assignment, Assignment, EventKind, Scenario};
use super::ScenarioError;

/// Whether the copied outcome equals the original with certainty, i.e.
/// `p(a|c) = δ_{a,c}` under every assignment that realizes the copy.
pub fn tracking_check(s: &Scenario, copy_event: &str) -> Result<bool, ScenarioError> {
    let e = s.event(copy_event).ok_or_else(|| ScenarioError::NoCopyEvent(copy_event.to_string()))?;
    let EventKind::Copy { memory, .. } = &e.kind else {
        return Err(ScenarioError::NoCopyEvent(copy_event.to_string()));
    };
    let copied = s
        .outcomes
        .iter()
        .find(|v| v.bindings.iter().any(|b| b == copy_event))
        .ok_or_else(|| ScenarioError::BadEvent { event: copy_event.into(), reason: "no variable is bound to it".into() })?;
    let mut checked = false;
    for a in s.all_assignments() {
        if !is_realized(e, &a)? {
            continue;
        }
        let circuit = compile(s, &a)?;
        let pos = circuit.position(copy_event).expect("realized copy is compiled");
        let source_event = circuit.events[..pos].iter().rev().find(|c| {
            matches!(&s.events[c.index].kind, EventKind::FriendMeasure { memory: m, .. } if m == memory)
        });
        let Some(source_event) = source_event else {
            return Ok(false);
        };
        let Some(source) = s.outcomes.iter().find(|v| v.bindings.contains(&source_event.id)) else {
            return Ok(false);
        };
        let t = event_distribution(s, &a, &[&source.name, &copied.name])?;
        let off_diagonal_zero = t
            .entries
            .iter()
            .filter(|e| e.outcome[0] != e.outcome[1])
            .all(|e| e.exact.as_ref().is_some_and(num_traits::Zero::is_zero));
        if !off_diagonal_zero {
            return Ok(false);
        }
        checked = true;
    }
    Ok(checked)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceCheck {
    pub variables: (String, String),
    /// Setting(s) varied while the table is compared.
    pub varied: String,
    pub holds: bool,
    pub max_deviation: f64,
}

/// Setting-invariance of the pairwise tables of `brukner_lf`-shaped scenarios
/// and the tables at `x=1, y=1` that the invariances carry over.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalAgencyReport {
    pub checks: Vec<InvarianceCheck>,
    /// `(c,d)`, `(c,b)`, `(a,d)`, `(a,b)` at `x=1, y=1`.
    pub tables: Vec<CorrelationTable>,
}

impl LocalAgencyReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(|c| c.holds)
    }
}

fn compare(tables: &[CorrelationTable]) -> (bool, f64) {
    let first = &tables[0];
    let mut holds = true;
    let mut dev = 0.0f64;
    for t in &tables[1..] {
        for (x, y) in first.entries.iter().zip(&t.entries) {
            dev = dev.max((x.probability - y.probability).abs());
            holds &= x.exact.is_some() && x.exact == y.exact;
        }
    }
    (holds, dev)
}

fn at(x: &str, y: &str) -> Assignment {
    parse_assignment(&format!("x={x},y={y}")).expect("literal assignment")
}

/// Requires settings `x`, `y` and variables `c`, `d`, `a`, `b`.
pub fn local_agency_report(s: &Scenario) -> Result<LocalAgencyReport, ScenarioError> {
    for name in ["x", "y"] {
        if s.setting(name).is_none() {
            return Err(ScenarioError::BadSettings(format!("scenario has no setting `{name}`")));
        }
    }
    let table = |u: &str, v: &str, a: &Assignment| event_distribution(s, a, &[u, v]);
    let mut checks = Vec::new();
    let mut push = |u: &str, v: &str, varied: String, tables: Vec<CorrelationTable>| {
        let (holds, max_deviation) = compare(&tables);
        checks.push(InvarianceCheck { variables: (u.into(), v.into()), varied, holds, max_deviation });
    };
    let all: Vec<CorrelationTable> =
        s.all_assignments().iter().map(|a| table("c", "d", a)).collect::<Result<_, _>>()?;
    push("c", "d", "x,y".into(), all);
    for y in ["0", "1"] {
        let ts = vec![table("c", "b", &at("0", y))?, table("c", "b", &at("1", y))?];
        push("c", "b", format!("x (y={y})"), ts);
    }
    for x in ["0", "1"] {
        let ts = vec![table("a", "d", &at(x, "0"))?, table("a", "d", &at(x, "1"))?];
        push("a", "d", format!("y (x={x})"), ts);
    }
    let target = at("1", "1");
    let tables = [("c", "d"), ("c", "b"), ("a", "d"), ("a", "b")]
        .iter()
        .map(|(u, v)| table(u, v, &target))
        .collect::<Result<_, _>>()?;
    Ok(LocalAgencyReport { checks, tables })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::lookup;

    #[test]
    fn lf_copies_track() {
        let s = lookup("brukner_lf").unwrap();
        assert!(tracking_check(&s, "a_ask").unwrap());
        assert!(tracking_check(&s, "b_ask").unwrap());
    }

    #[test]
    fn missing_copy_reported() {
        let mut s = lookup("brukner_lf").unwrap();
        s.events.retain(|e| e.id != "a_ask");
        assert_eq!(tracking_check(&s, "a_ask"), Err(ScenarioError::NoCopyEvent("a_ask".into())));
    }

    #[test]
    fn lf_invariances_hold() {
        let r = local_agency_report(&lookup("brukner_lf").unwrap()).unwrap();
        assert_eq!(r.checks.len(), 5);
        assert!(r.all_hold(), "{:?}", r.checks);
    }
}
