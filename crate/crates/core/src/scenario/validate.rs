use std::collections::BTreeMap;
use std::fmt;

use serde::Serialize;

use crate::qcore::{RegisterRole, MAX_QUBITS};

use super::compile::{compile, resolve_basis, resolve_single_basis, resolve_state};
use super::model::{format_assignment, Event, EventKind, Guard, Scenario};

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    /// Field path such as `events[3].target`, or `line 4, column 7` for syntax errors.
    pub location: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

fn conflicting(a: &Option<Guard>, b: &Option<Guard>) -> bool {
    matches!((a, b), (Some(a), Some(b)) if a.setting == b.setting && a.value != b.value)
}

fn duplicates<'a>(names: impl Iterator<Item = &'a str>) -> Vec<&'a str> {
    let mut seen = BTreeMap::new();
    for n in names {
        *seen.entry(n).or_insert(0) += 1;
    }
    seen.into_iter().filter(|(_, c)| *c > 1).map(|(n, _)| n).collect()
}

/// Schema-level and semantic checks. Never panics; an empty list means valid.
pub fn validate(s: &Scenario) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    let mut diag = |location: String, message: String| out.push(Diagnostic { location, message });

    for d in duplicates(s.events.iter().map(|e| e.id.as_str())) {
        diag("events".into(), format!("duplicate event id `{d}`"));
    }
    for d in duplicates(s.agents.iter().map(|a| a.name.as_str())) {
        diag("agents".into(), format!("duplicate agent `{d}`"));
    }
    for d in duplicates(s.registers.iter().map(|r| r.label.as_str())) {
        diag("registers".into(), format!("duplicate register `{d}`"));
    }
    for d in duplicates(s.outcomes.iter().map(|v| v.name.as_str())) {
        diag("outcomes".into(), format!("duplicate outcome variable `{d}`"));
    }
    for d in duplicates(s.settings.iter().map(|v| v.name.as_str())) {
        diag("settings".into(), format!("duplicate setting `{d}`"));
    }
    if s.registers.len() > MAX_QUBITS {
        diag("registers".into(), format!("{} registers exceed the limit of {MAX_QUBITS}", s.registers.len()));
    }
    if s.timing.signal_delay < 0 {
        diag("timing.signal_delay".into(), format!("signal delay {} is negative", s.timing.signal_delay));
    }
    for (i, r) in s.registers.iter().enumerate() {
        if let Some(o) = &r.owner {
            if s.agent(o).is_none() {
                diag(format!("registers[{i}].owner"), format!("unknown agent `{o}`"));
            }
        }
    }
    for (i, st) in s.settings.iter().enumerate() {
        if s.agent(&st.owner).is_none() {
            diag(format!("settings[{i}].owner"), format!("unknown agent `{}`", st.owner));
        }
        if st.values.is_empty() {
            diag(format!("settings[{i}].values"), "setting has no values".into());
        }
    }

    for (i, e) in s.events.iter().enumerate() {
        let at = |field: &str| format!("events[{i}]{}{field} ({})", if field.is_empty() { "" } else { "." }, e.id);
        if let Some(g) = &e.guard {
            match s.setting(&g.setting) {
                None => diag(at("guard"), format!("guard references undeclared setting `{}`", g.setting)),
                Some(st) if !st.values.contains(&g.value) => {
                    diag(at("guard"), format!("setting `{}` has no value `{}`", g.setting, g.value))
                }
                _ => {}
            }
        }
        if let Some(a) = e.kind.agent() {
            if s.agent(a).is_none() {
                diag(at("agent"), format!("unknown agent `{a}`"));
            }
        }
        let mut check_reg = |field: &str, r: &str| {
            if s.register(r).is_none() {
                diag(at(field), format!("unknown register `{r}`"));
            }
        };
        match &e.kind {
            EventKind::Prepare { registers, .. } | EventKind::SuperMeasure { registers, .. } | EventKind::Gate { registers, .. } => {
                registers.iter().for_each(|r| check_reg("registers", r))
            }
            EventKind::FriendMeasure { system, memory, .. } => {
                check_reg("system", system);
                check_reg("memory", memory);
            }
            EventKind::Copy { memory, target, .. } => {
                check_reg("memory", memory);
                if let Some(t) = target {
                    check_reg("target", t);
                }
            }
            EventKind::Undo { .. } => {}
        }
        match &e.kind {
            EventKind::Prepare { registers, state } => {
                if let Err(err) = resolve_state(e, state, registers.len()) {
                    diag(at("state"), err_reason(err));
                }
            }
            EventKind::FriendMeasure { basis, .. } => {
                if let Err(err) = resolve_single_basis(e, basis) {
                    diag(at("basis"), err_reason(err));
                }
            }
            EventKind::SuperMeasure { registers, basis, .. } => {
                if let Err(err) = resolve_basis(e, basis, registers.len()) {
                    diag(at("basis"), err_reason(err));
                }
            }
            EventKind::Copy { memory, .. } => {
                if let Some(r) = s.register(memory) {
                    if r.role != RegisterRole::Memory {
                        diag(at("memory"), format!("copy reads `{memory}`, which is not a friend-memory register"));
                    }
                }
            }
            EventKind::Undo { target, .. } => match s.event(target) {
                None => diag(at("target"), format!("undo references missing event `{target}`")),
                Some(t) => {
                    if !matches!(t.kind, EventKind::FriendMeasure { .. }) {
                        diag(at("target"), format!("undo target `{target}` is a {} event, not a friend measurement", t.kind.name()));
                    }
                    if t.time >= e.time {
                        diag(at("time"), format!("undo at tick {} does not follow `{target}` at tick {}", e.time, t.time));
                    }
                    if t.site != e.site {
                        diag(at("site"), format!("undo at site `{}` targets `{target}` at site `{}`", e.site, t.site));
                    }
                }
            },
            EventKind::Gate { .. } => {}
        }
    }

    // strictly increasing ticks per site among events that can co-occur
    for (i, a) in s.events.iter().enumerate() {
        for b in &s.events[i + 1..] {
            if a.site == b.site && a.time == b.time && !conflicting(&a.guard, &b.guard) {
                diag(
                    format!("events[{i}].time ({})", a.id),
                    format!("events `{}` and `{}` share tick {} at site `{}`", a.id, b.id, a.time, a.site),
                );
            }
        }
    }

    for (i, v) in s.outcomes.iter().enumerate() {
        if s.agent(&v.owner).is_none() {
            diag(format!("outcomes[{i}].owner"), format!("unknown agent `{}`", v.owner));
        }
        if v.bindings.is_empty() {
            diag(format!("outcomes[{i}].bindings"), format!("variable `{}` is bound to no event", v.name));
        }
        let events: Vec<&Event> = v.bindings.iter().filter_map(|b| s.event(b)).collect();
        for b in &v.bindings {
            match s.event(b) {
                None => diag(format!("outcomes[{i}].bindings"), format!("variable `{}` bound to missing event `{b}`", v.name)),
                Some(e) if matches!(e.kind, EventKind::Prepare { .. } | EventKind::Undo { .. } | EventKind::Gate { .. }) => diag(
                    format!("outcomes[{i}].bindings"),
                    format!("variable `{}` bound to {} event `{b}`, which has no outcome", v.name, e.kind.name()),
                ),
                _ => {}
            }
        }
        for (j, a) in events.iter().enumerate() {
            for b in &events[j + 1..] {
                if !conflicting(&a.guard, &b.guard) {
                    diag(
                        format!("outcomes[{i}].bindings"),
                        format!("bindings `{}` and `{}` of `{}` are not mutually exclusive", a.id, b.id, v.name),
                    );
                }
            }
        }
        for (k, other) in s.outcomes.iter().enumerate().skip(i + 1) {
            if let Some(b) = v.bindings.iter().find(|b| other.bindings.contains(b)) {
                diag(format!("outcomes[{k}].bindings"), format!("event `{b}` is bound to both `{}` and `{}`", v.name, other.name));
            }
        }
    }

    if out.is_empty() {
        for a in s.all_assignments() {
            if let Err(err) = compile(s, &a) {
                let loc = if a.is_empty() { "compile".to_string() } else { format!("compile ({})", format_assignment(&a)) };
                out.push(Diagnostic { location: loc, message: err.to_string() });
            }
        }
    }
    out
}

fn err_reason(err: super::ScenarioError) -> String {
    match err {
        super::ScenarioError::BadEvent { reason, .. } => reason,
        other => other.to_string(),
    }
}

/// Parses and validates a scenario file's text.
pub fn validate_json(text: &str) -> Result<Scenario, Vec<Diagnostic>> {
    let s = Scenario::from_json(text).map_err(|e| match e {
        super::ScenarioError::Parse { line, column, message } => {
            vec![Diagnostic { location: format!("line {line}, column {column}"), message }]
        }
        other => vec![Diagnostic { location: "file".into(), message: other.to_string() }],
    })?;
    let d = validate(&s);
    if d.is_empty() {
        Ok(s)
    } else {
        Err(d)
    }
}
