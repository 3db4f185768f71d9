//! Built-in scenarios.
//!
//! Sites are `left`/`right` for two-wing experiments and `lab` for single-lab
//! ones; the shared source prepares at tick 0.

use crate::qcore::Register;

use super::model::{
    Agent, AgentRole, BasisSpec, Event, EventKind, GateSpec, Guard, OutcomeVariable, Scenario, Setting, StateSpec,
    TimingProfile,
};
use super::ScenarioError;

/// Canonical names accepted by [`lookup`]; `gao(k, foliation)` takes any `k >= 1`.
pub const CATALOGUE_NAMES: &[&str] = &[
    "wigner_friend",
    "wigner_enemy",
    "wigner_stalkee",
    "hardy",
    "brukner_lf",
    "pusey_masanes_fr",
    "pusey_masanes_fr(mirror)",
    "gao(k, debbie_first)",
    "gao(k, debbie_last)",
    "guerin_modified",
    "guerin_original",
];

/// Largest `k` accepted for the sequential scenario.
pub const GAO_MAX_K: usize = 16;

fn agent(name: &str, role: AgentRole) -> Agent {
    Agent { name: name.into(), role }
}

fn ev(id: &str, time: i64, site: &str, kind: EventKind) -> Event {
    Event { id: id.into(), time, site: site.into(), guard: None, kind }
}

fn guarded(mut e: Event, setting: &str, value: &str) -> Event {
    e.guard = Some(Guard::new(setting, value));
    e
}

fn prepare(registers: &[&str], state: &str) -> Event {
    ev(
        "prepare",
        0,
        "source",
        EventKind::Prepare { registers: registers.iter().map(|r| r.to_string()).collect(), state: StateSpec::Named(state.into()) },
    )
}

fn basis(name: &str) -> BasisSpec {
    BasisSpec::Named(name.into())
}

fn measure(id: &str, time: i64, site: &str, who: &str, system: &str, memory: &str, b: &str) -> Event {
    ev(
        id,
        time,
        site,
        EventKind::FriendMeasure { agent: who.into(), system: system.into(), memory: memory.into(), basis: basis(b) },
    )
}

fn undo(id: &str, time: i64, site: &str, who: &str, target: &str) -> Event {
    ev(id, time, site, EventKind::Undo { agent: who.into(), target: target.into() })
}

fn super_measure(id: &str, time: i64, site: &str, who: &str, registers: &[&str], b: &str) -> Event {
    ev(
        id,
        time,
        site,
        EventKind::SuperMeasure {
            agent: who.into(),
            registers: registers.iter().map(|r| r.to_string()).collect(),
            basis: basis(b),
        },
    )
}

fn copy(id: &str, time: i64, site: &str, who: &str, memory: &str, target: Option<&str>) -> Event {
    ev(id, time, site, EventKind::Copy { agent: who.into(), memory: memory.into(), target: target.map(Into::into) })
}

fn var(name: &str, owner: &str, bindings: &[&str]) -> OutcomeVariable {
    OutcomeVariable { name: name.into(), owner: owner.into(), bindings: bindings.iter().map(|b| b.to_string()).collect() }
}

fn binary_setting(name: &str, owner: &str, site: &str) -> Setting {
    Setting { name: name.into(), owner: owner.into(), site: site.into(), values: vec!["0".into(), "1".into()] }
}

fn single_lab(name: &str, mut events: Vec<Event>, outcomes: Vec<OutcomeVariable>) -> Scenario {
    let mut all = vec![prepare(&["S"], "plus")];
    all.append(&mut events);
    Scenario {
        name: name.into(),
        agents: vec![agent("Friend", AgentRole::Friend), agent("Wigner", AgentRole::Superobserver)],
        registers: vec![Register::owned_system("S", "Friend"), Register::memory("F", "Friend")],
        events: all,
        settings: vec![],
        outcomes,
        timing: TimingProfile { signal_delay: 1 },
    }
}

/// Friend measures `|+⟩` in the computational basis, then tells Wigner.
pub fn wigner_friend() -> Scenario {
    single_lab(
        "wigner_friend",
        vec![measure("f_measure", 1, "lab", "Friend", "S", "F", "computational"), copy("w_ask", 2, "lab", "Wigner", "F", None)],
        vec![var("f", "Friend", &["f_measure"]), var("w", "Wigner", &["w_ask"])],
    )
}

/// Wigner undoes the friend's measurement and measures `S` in the ± basis.
pub fn wigner_enemy() -> Scenario {
    single_lab(
        "wigner_enemy",
        vec![
            measure("f_measure", 1, "lab", "Friend", "S", "F", "computational"),
            undo("w_undo", 2, "lab", "Wigner", "f_measure"),
            super_measure("w_measure", 3, "lab", "Wigner", &["S"], "plus_minus"),
        ],
        vec![var("f", "Friend", &["f_measure"]), var("w", "Wigner", &["w_measure"])],
    )
}

/// Wigner measures friend and system jointly in the Bell basis.
pub fn wigner_stalkee() -> Scenario {
    single_lab(
        "wigner_stalkee",
        vec![
            measure("f_measure", 1, "lab", "Friend", "S", "F", "computational"),
            super_measure("w_measure", 2, "lab", "Wigner", &["S", "F"], "bell"),
        ],
        vec![var("f", "Friend", &["f_measure"]), var("w", "Wigner", &["w_measure"])],
    )
}

/// Two parties measure the Hardy state directly: computational basis for
/// setting 0, ± basis for setting 1.
pub fn hardy() -> Scenario {
    Scenario {
        name: "hardy".into(),
        agents: vec![agent("Alice", AgentRole::Superobserver), agent("Bob", AgentRole::Superobserver)],
        registers: vec![Register::owned_system("R", "Alice"), Register::owned_system("S", "Bob")],
        events: vec![
            prepare(&["R", "S"], "hardy"),
            guarded(super_measure("a_computational", 1, "left", "Alice", &["R"], "computational"), "x", "0"),
            guarded(super_measure("a_plus_minus", 1, "left", "Alice", &["R"], "plus_minus"), "x", "1"),
            guarded(super_measure("b_computational", 1, "right", "Bob", &["S"], "computational"), "y", "0"),
            guarded(super_measure("b_plus_minus", 1, "right", "Bob", &["S"], "plus_minus"), "y", "1"),
        ],
        settings: vec![binary_setting("x", "Alice", "left"), binary_setting("y", "Bob", "right")],
        outcomes: vec![
            var("a", "Alice", &["a_computational", "a_plus_minus"]),
            var("b", "Bob", &["b_computational", "b_plus_minus"]),
        ],
        timing: TimingProfile { signal_delay: 3 },
    }
}

fn four_agents() -> Vec<Agent> {
    vec![
        agent("Alice", AgentRole::Superobserver),
        agent("Bob", AgentRole::Superobserver),
        agent("Charlie", AgentRole::Friend),
        agent("Debbie", AgentRole::Friend),
    ]
}

/// Friends Charlie and Debbie measure the Hardy state; Alice may ask Charlie
/// (x=0) or undo him and measure ± (x=1); Bob likewise with Debbie and y.
pub fn brukner_lf() -> Scenario {
    Scenario {
        name: "brukner_lf".into(),
        agents: four_agents(),
        registers: vec![
            Register::owned_system("R", "Charlie"),
            Register::owned_system("S", "Debbie"),
            Register::memory("C", "Charlie"),
            Register::memory("D", "Debbie"),
            Register::memory("A", "Alice"),
            Register::memory("B", "Bob"),
        ],
        events: vec![
            prepare(&["R", "S"], "hardy"),
            measure("c_measure", 1, "left", "Charlie", "R", "C", "computational"),
            measure("d_measure", 1, "right", "Debbie", "S", "D", "computational"),
            guarded(undo("a_undo", 10, "left", "Alice", "c_measure"), "x", "1"),
            guarded(copy("a_ask", 11, "left", "Alice", "C", Some("A")), "x", "0"),
            guarded(super_measure("a_measure", 11, "left", "Alice", &["R"], "plus_minus"), "x", "1"),
            guarded(undo("b_undo", 20, "right", "Bob", "d_measure"), "y", "1"),
            guarded(copy("b_ask", 21, "right", "Bob", "D", Some("B")), "y", "0"),
            guarded(super_measure("b_measure", 21, "right", "Bob", &["S"], "plus_minus"), "y", "1"),
        ],
        settings: vec![binary_setting("x", "Alice", "left"), binary_setting("y", "Bob", "right")],
        outcomes: vec![
            var("c", "Charlie", &["c_measure"]),
            var("d", "Debbie", &["d_measure"]),
            var("a", "Alice", &["a_ask", "a_measure"]),
            var("b", "Bob", &["b_ask", "b_measure"]),
        ],
        timing: TimingProfile { signal_delay: 3 },
    }
}

/// Fixed-measurement version: both friends are undone, Alice acts at tick 10
/// and Bob at tick 20 (`mirror` swaps the two).
pub fn pusey_masanes_fr(mirror: bool) -> Scenario {
    let (ta, tb) = if mirror { (20, 10) } else { (10, 20) };
    Scenario {
        name: if mirror { "pusey_masanes_fr(mirror)" } else { "pusey_masanes_fr" }.into(),
        agents: four_agents(),
        registers: vec![
            Register::owned_system("R", "Charlie"),
            Register::owned_system("S", "Debbie"),
            Register::memory("C", "Charlie"),
            Register::memory("D", "Debbie"),
        ],
        events: vec![
            prepare(&["R", "S"], "hardy"),
            measure("c_measure", 1, "left", "Charlie", "R", "C", "computational"),
            measure("d_measure", 1, "right", "Debbie", "S", "D", "computational"),
            undo("a_undo", ta, "left", "Alice", "c_measure"),
            super_measure("a_measure", ta + 1, "left", "Alice", &["R"], "plus_minus"),
            undo("b_undo", tb, "right", "Bob", "d_measure"),
            super_measure("b_measure", tb + 1, "right", "Bob", &["S"], "plus_minus"),
        ],
        settings: vec![],
        outcomes: vec![
            var("c", "Charlie", &["c_measure"]),
            var("d", "Debbie", &["d_measure"]),
            var("a", "Alice", &["a_measure"]),
            var("b", "Bob", &["b_measure"]),
        ],
        timing: TimingProfile { signal_delay: 3 },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Foliation {
    DebbieFirst,
    DebbieLast,
}

impl Foliation {
    pub fn name(self) -> &'static str {
        match self {
            Foliation::DebbieFirst => "debbie_first",
            Foliation::DebbieLast => "debbie_last",
        }
    }

    pub fn parse(s: &str) -> Option<Foliation> {
        match s {
            "debbie_first" => Some(Foliation::DebbieFirst),
            "debbie_last" => Some(Foliation::DebbieLast),
            _ => None,
        }
    }
}

/// Singlet shared by Charlie (R) and Debbie (S). Charlie measures `k` times,
/// with Alice undoing every measurement except the last.
pub fn gao(k: usize, foliation: Foliation) -> Result<Scenario, ScenarioError> {
    if k == 0 || k > GAO_MAX_K {
        return Err(ScenarioError::InvalidParameter(format!("gao needs 1 <= k <= {GAO_MAX_K}, got {k}")));
    }
    let charlie_start: i64 = if foliation == Foliation::DebbieFirst { 2 } else { 1 };
    let debbie_time: i64 = if foliation == Foliation::DebbieFirst { 1 } else { 2 * k as i64 };
    let mut events = vec![prepare(&["R", "S"], "singlet")];
    let mut outcomes = Vec::new();
    let mut t = charlie_start;
    for i in 1..=k {
        let id = format!("c{i}_measure");
        events.push(measure(&id, t, "charlie-lab", "Charlie", "R", "C", "computational"));
        outcomes.push(var(&format!("c{i}"), "Charlie", &[&id]));
        t += 1;
        if i < k {
            events.push(undo(&format!("c{i}_undo"), t, "charlie-lab", "Alice", &id));
            t += 1;
        }
    }
    events.push(measure("d_measure", debbie_time, "debbie-lab", "Debbie", "S", "D", "computational"));
    outcomes.push(var("d", "Debbie", &["d_measure"]));
    Ok(Scenario {
        name: format!("gao({k}, {})", foliation.name()),
        agents: vec![
            agent("Alice", AgentRole::Superobserver),
            agent("Charlie", AgentRole::Friend),
            agent("Debbie", AgentRole::Friend),
        ],
        registers: vec![
            Register::owned_system("R", "Charlie"),
            Register::owned_system("S", "Debbie"),
            Register::memory("C", "Charlie"),
            Register::memory("D", "Debbie"),
        ],
        events,
        settings: vec![],
        outcomes,
        timing: TimingProfile { signal_delay: 1000 },
    })
}

/// Friend measures computationally, Wigner undoes it, friend measures ±.
pub fn guerin_modified() -> Scenario {
    single_lab(
        "guerin_modified",
        vec![
            measure("f1_measure", 1, "lab", "Friend", "S", "F", "computational"),
            undo("w_undo", 2, "lab", "Wigner", "f1_measure"),
            measure("f2_measure", 3, "lab", "Friend", "S", "F", "plus_minus"),
        ],
        vec![var("f1", "Friend", &["f1_measure"]), var("f2", "Friend", &["f2_measure"])],
    )
}

/// Friend measures computationally, Wigner applies a joint unitary on system
/// and friend, and the friend then reads its own memory again.
pub fn guerin_original() -> Scenario {
    single_lab(
        "guerin_original",
        vec![
            measure("f1_measure", 1, "lab", "Friend", "S", "F", "computational"),
            ev(
                "w_unitary",
                2,
                "lab",
                EventKind::Gate { agent: "Wigner".into(), registers: vec!["S".into(), "F".into()], gate: GateSpec::Named("bell_rotation".into()) },
            ),
            copy("f2_read", 3, "lab", "Friend", "F", None),
        ],
        vec![var("f1", "Friend", &["f1_measure"]), var("f2", "Friend", &["f2_read"])],
    )
}

/// Every fixed built-in plus `gao(k, ·)` for `k = 1, 2, 3`.
pub fn catalogue() -> Vec<Scenario> {
    let mut out = vec![
        wigner_friend(),
        wigner_enemy(),
        wigner_stalkee(),
        hardy(),
        brukner_lf(),
        pusey_masanes_fr(false),
        pusey_masanes_fr(true),
    ];
    for k in 1..=3 {
        for f in [Foliation::DebbieFirst, Foliation::DebbieLast] {
            out.push(gao(k, f).expect("small k is valid"));
        }
    }
    out.push(guerin_modified());
    out.push(guerin_original());
    out
}

/// Finds a built-in by name, e.g. `pusey_masanes_fr` or `gao(3, debbie_first)`.
pub fn lookup(name: &str) -> Result<Scenario, ScenarioError> {
    let compact: String = name.chars().filter(|c| !c.is_whitespace()).collect();
    let unknown = || ScenarioError::UnknownScenario(name.to_string());
    Ok(match compact.as_str() {
        "wigner_friend" => wigner_friend(),
        "wigner_enemy" => wigner_enemy(),
        "wigner_stalkee" => wigner_stalkee(),
        "hardy" => hardy(),
        "brukner_lf" => brukner_lf(),
        "pusey_masanes_fr" => pusey_masanes_fr(false),
        "pusey_masanes_fr(mirror)" => pusey_masanes_fr(true),
        "guerin_modified" => guerin_modified(),
        "guerin_original" => guerin_original(),
        other => {
            let args = other.strip_prefix("gao(").and_then(|r| r.strip_suffix(')')).ok_or_else(unknown)?;
            let (k, f) = args.split_once(',').ok_or_else(unknown)?;
            let k: usize = k.parse().map_err(|_| unknown())?;
            gao(k, Foliation::parse(f).ok_or_else(unknown)?)?
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pm_has_expected_shape() {
        let s = lookup("pusey_masanes_fr").unwrap();
        assert_eq!(s.agents.len(), 4);
        let count = |k: &str| s.events.iter().filter(|e| e.kind.name() == k).count();
        assert_eq!((count("prepare"), count("friend_measure"), count("undo"), count("super_measure")), (1, 2, 2, 2));
        assert!(matches!(&s.events[0].kind, EventKind::Prepare { state: StateSpec::Named(n), .. } if n == "hardy"));
    }

    #[test]
    fn gao_three_cycles() {
        let s = lookup("gao(3, debbie_first)").unwrap();
        assert_eq!(s.name, "gao(3, debbie_first)");
        let count = |k: &str| s.events.iter().filter(|e| e.kind.name() == k).count();
        assert_eq!(count("friend_measure"), 4);
        assert_eq!(count("undo"), 2);
        assert!(matches!(&s.events[0].kind, EventKind::Prepare { state: StateSpec::Named(n), .. } if n == "singlet"));
        assert_eq!(lookup("gao( 2 , debbie_last )").unwrap().name, "gao(2, debbie_last)");
    }

    #[test]
    fn unknown_names_fail() {
        for n in ["unknown", "gao(0, debbie_first)", "gao(2, sideways)", "gao(x, debbie_last)"] {
            assert!(lookup(n).is_err(), "{n}");
        }
    }

    #[test]
    fn catalogue_names_resolve() {
        for s in catalogue() {
            assert_eq!(lookup(&s.name).unwrap(), s);
        }
    }
}
