use std::path::PathBuf;

use ewf_core::epistemic::EpistemicError;
use ewf_core::feasibility::FeasibilityError;
use ewf_core::possibilistic::PossibilisticError;
use ewf_core::scenario::{Diagnostic, ScenarioError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot read `{path}`: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write `{path}`: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("`{path}` is not a valid scenario:\n{}", list(.diagnostics))]
    Invalid { path: PathBuf, diagnostics: Vec<Diagnostic> },
    #[error("certificate `{0}` does not verify")]
    Unverified(PathBuf),
    #[error("output error: {0}")]
    Output(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error(transparent)]
    Possibilistic(#[from] PossibilisticError),
    #[error(transparent)]
    Epistemic(#[from] EpistemicError),
    #[error(transparent)]
    Feasibility(#[from] FeasibilityError),
}

fn list(d: &[Diagnostic]) -> String {
    d.iter().map(|x| format!("  {x}")).collect::<Vec<_>>().join("\n")
}
