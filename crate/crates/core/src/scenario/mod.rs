//! Declarative experiments: agents, registers, timed and sited events.
//!
//! A [`Scenario`] compiles, for one setting assignment, into an ordered list
//! of unitary steps and readouts. Joint tables are computed by two-time
//! sequential projection: each selected variable's projector is inserted right
//! after its event and `p = ‖Π_k U_k … Π_1 U_1 ψ₀‖²`. Unselected variables are
//! not projected.

mod access;
mod behavior;
pub mod catalogue;
mod checks;
mod compile;
mod distribution;
mod gao;
mod model;
mod stalkee;
mod validate;

use thiserror::Error;

use crate::qcore::QcoreError;

pub use access::{classify_accessibility, Accessibility, RecordLifetime};
pub use behavior::Behavior;
pub use catalogue::{catalogue, lookup, Foliation, CATALOGUE_NAMES};
pub use checks::{local_agency_report, tracking_check, InvarianceCheck, LocalAgencyReport};
pub use compile::{compile, compile_with, Circuit, CompileOptions, CompiledEvent, CopySemantics, GateStep, Readout};
pub use distribution::{
    event_distribution, event_distribution_with, realized_binding, CorrelationTable, InputOverride, TableEntry,
};
pub use gao::{gao_run, GaoPolicy, GaoRun};
pub use model::{
    format_assignment, parse_assignment, Agent, AgentRole, Assignment, BasisSpec, ComplexPair, Event, EventKind,
    GateSpec, Guard, OutcomeVariable, Scenario, Setting, StateSpec, TimingProfile,
};
pub use stalkee::{stalkee_predictions, stalkee_predictions_for, StalkeePredictions};
pub use validate::{validate, validate_json, Diagnostic};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scenario JSON error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("bad settings: {0}")]
    BadSettings(String),
    #[error("event `{event}` is guarded by setting `{setting}`, which has no value in the assignment")]
    UnresolvedGuard { event: String, setting: String },
    #[error("unknown event `{0}`")]
    UnknownEvent(String),
    #[error("unknown outcome variable `{0}`")]
    UnknownVariable(String),
    #[error("unknown register `{0}`")]
    UnknownRegister(String),
    #[error("variable `{variable}` is unrealized under settings `{settings}`")]
    Unrealized { variable: String, settings: String },
    #[error("variable `{0}` has more than one realized binding")]
    AmbiguousBinding(String),
    #[error("undo `{undo}` cannot reverse `{target}`: {reason}")]
    BadUndo { undo: String, target: String, reason: String },
    #[error("undo `{undo}` targets `{target}`, but memory `{memory}` was reused by `{by}` in between")]
    MemoryReused { undo: String, target: String, memory: String, by: String },
    #[error("no copy event `{0}`")]
    NoCopyEvent(String),
    #[error("copy `{0}` needs a target register under unitary copy semantics")]
    CopyWithoutTarget(String),
    #[error("event `{event}`: {reason}")]
    BadEvent { event: String, reason: String },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("trials must be positive")]
    ZeroTrials,
    #[error(transparent)]
    Qcore(#[from] QcoreError),
}
