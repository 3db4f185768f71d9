use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::render::Format;

/// Extended Wigner's friend workbench: tables, contradictions, nested
/// knowledge, and exact feasibility certificates.
///
/// Exit status: 0 when the analysis ran and established nothing, 2 when it
/// established a contradiction or infeasibility, 1 on usage or input errors.
#[derive(Debug, Parser)]
#[command(name = "ewf", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Output {
    /// Output format (csv or md).
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct Source {
    /// Built-in scenario name or path to a scenario JSON file.
    #[arg(long)]
    pub scenario: Option<String>,
    /// Setting assignment such as `x=1,y=1`; every assignment when omitted.
    #[arg(long)]
    pub settings: Option<String>,
    /// Variable pairs such as `c:d,c:b`; cross-site pairs when omitted.
    #[arg(long)]
    pub pairs: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Policy {
    Collapse,
    Independent,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List the built-in scenarios.
    Scenarios,
    /// Pairwise joint outcome tables.
    Tables {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
    },
    /// Possibilistic chain from zero-probability predictions to a contradiction.
    Contradiction {
        #[command(flatten)]
        source: Source,
        #[command(flatten)]
        output: Output,
    },
    /// Nested-knowledge inference under a Heisenberg-cut table.
    Epistemic {
        /// Built-in scenario name or path to a scenario JSON file.
        #[arg(long)]
        scenario: Option<String>,
        /// Cut table JSON: agent to the agents it views as quantum.
        #[arg(long)]
        cuts: Option<PathBuf>,
        /// Remove `consistency`, a rule `R1`..`R5`, or a seed family `seed:FAMILY`.
        #[arg(long)]
        ablate: Vec<String>,
        /// Let every agent reproduce every other agent's reasoning.
        #[arg(long)]
        lift_all: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Exact LP feasibility: pairwise marginals, local-polytope membership, or joint measurability.
    Feasibility {
        #[command(flatten)]
        source: Source,
        /// Drop a target law, as `u:v`.
        #[arg(long)]
        drop: Vec<String>,
        /// Local-polytope membership of `hardy`, `pr_box`, or `deterministic:A0A1B0B1`.
        #[arg(long, conflicts_with = "povm")]
        behavior: Option<String>,
        /// Joint measurability of two qubit bases, e.g. `computational,plus_minus`.
        #[arg(long)]
        povm: Option<String>,
        /// Write the certificate file here.
        #[arg(long)]
        cert: Option<PathBuf>,
        #[command(flatten)]
        output: Output,
    },
    /// Local Agency invariances, tracking, and the chain at the last settings.
    LfCheck {
        /// Built-in scenario name or path to a scenario JSON file.
        #[arg(long)]
        scenario: Option<String>,
        #[command(flatten)]
        output: Output,
    },
    /// Repeated measurement and undo of one friend against a distant record.
    Gao {
        #[arg(long, default_value_t = 3)]
        k: usize,
        /// `debbie_first` or `debbie_last`.
        #[arg(long, default_value = "debbie_first")]
        foliation: String,
        #[arg(long, value_enum, default_value_t = Policy::Collapse)]
        policy: Policy,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Measure, undo, re-measure marginals against closed forms, and the joint POVM question.
    Guerin {
        /// Random input states to check.
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Every analysis in one Markdown report; certificate files are re-verified.
    Report {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        trials: u64,
        /// Certificate files to include.
        #[arg(long)]
        cert: Vec<PathBuf>,
        /// Write to this file instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Schema and semantic checks of a scenario file.
    Validate {
        file: PathBuf,
    },
    /// Write a built-in scenario as JSON.
    Export {
        #[arg(long)]
        scenario: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}
