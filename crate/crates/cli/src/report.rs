use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ewf_core::epistemic::CutTable;
use ewf_core::feasibility::{fine_membership, pairwise_marginal_feasibility, CertificateFile, FeasibilityResult, LinearProgram};
use ewf_core::fmt::format_probability;
use ewf_core::qcore::format_rational;
use ewf_core::scenario::{classify_accessibility, lookup, stalkee_predictions, Accessibility, Behavior};
use num_traits::Zero;
use rayon::prelude::*;

use crate::cli::{Policy, Source};
use crate::commands::{self, Outcome};
use crate::error::CliError;
use crate::load;
use crate::render::{settings_text, Format, Table};

pub struct ReportArgs {
    pub seed: u64,
    pub trials: u64,
    pub certs: Vec<PathBuf>,
}

#[derive(Clone)]
enum Section {
    Tables,
    Accessibility,
    Contradiction,
    LfCheck,
    Epistemic,
    Marginals,
    Fine,
    Gao,
    Guerin,
    Stalkee,
    Certificate(PathBuf),
}

fn source(name: &str) -> Source {
    Source { scenario: Some(name.to_string()), settings: None, pairs: None }
}

fn accessibility() -> Result<Outcome, CliError> {
    let mut out = String::from("## Record accessibility\n\n");
    for name in ["pusey_masanes_fr", "pusey_masanes_fr(mirror)"] {
        let s = lookup(name)?;
        let mut t = Table::new(&["settings", "u", "v", "status"]);
        for a in s.all_assignments() {
            for (u, v) in load::default_pairs(&s, &a) {
                let status = match classify_accessibility(&s, &a, &u, &v)? {
                    Accessibility::Accessible => "accessible".to_string(),
                    Accessibility::Inaccessible(why) => format!("inaccessible: {why}"),
                };
                t.push(vec![settings_text(&a), u, v, status]);
            }
        }
        let _ = write!(out, "### {name}\n\n{}\n", t.to_markdown());
    }
    Ok(Outcome { text: out, established: false })
}

fn marginals() -> Result<Outcome, CliError> {
    let s = lookup("pusey_masanes_fr")?;
    let a = s.all_assignments().pop().expect("at least the empty assignment");
    let pairs = load::default_pairs(&s, &a);
    let spec = commands::pm_spec(&s, &a, &pairs)?;
    let full = pairwise_marginal_feasibility(&spec)?;
    let mut out = format!("## Pairwise marginal feasibility: pusey_masanes_fr\n\nAll {} laws: ", pairs.len());
    out.push_str(if full.is_feasible() { "feasible\n\n" } else { "infeasible\n\n" });
    out.push_str(&commands::result_table(&full).to_markdown());
    let mut t = Table::new(&["omitted law", "result", "verified"]);
    for (u, v) in &pairs {
        let r = pairwise_marginal_feasibility(&spec.without_pair(u, v))?;
        let word = if r.is_feasible() { "feasible" } else { "infeasible" };
        t.push(vec![format!("p({u}, {v})"), word.to_string(), r.verified().to_string()]);
    }
    let _ = write!(out, "\nEach three-law subsystem:\n\n{}", t.to_markdown());
    Ok(Outcome { text: out, established: !full.is_feasible() })
}

fn fine() -> Result<Outcome, CliError> {
    let mut t = Table::new(&["behavior", "result", "verified"]);
    let mut any = false;
    for (name, b) in [("hardy", Behavior::hardy()), ("pr_box", Behavior::pr_box())] {
        let r = fine_membership(&b)?;
        any |= !r.is_feasible();
        let word = if r.is_feasible() { "inside the local polytope" } else { "outside the local polytope" };
        t.push(vec![name.to_string(), word.to_string(), r.verified().to_string()]);
    }
    Ok(Outcome { text: format!("## Local-polytope membership\n\n{}", t.to_markdown()), established: any })
}

fn stalkee() -> Result<Outcome, CliError> {
    let p = stalkee_predictions()?;
    let mut t = Table::new(&["perspective", "p(phi+)"]);
    t.push(vec!["Wigner".into(), format_probability(p.wigner, p.wigner_exact.as_ref())]);
    t.push(vec!["friend".into(), format_probability(p.friend, p.friend_exact.as_ref())]);
    Ok(Outcome { text: format!("## Stalkee split\n\n{}", t.to_markdown()), established: false })
}

/// Nonzero entries of a stored witness or certificate.
fn program_table(program: &LinearProgram, result: &FeasibilityResult) -> Table {
    match result {
        FeasibilityResult::Infeasible { certificate } => {
            let mut t = Table::new(&["constraint", "multiplier"]);
            for (c, y) in program.constraints.iter().zip(&certificate.multipliers) {
                if !y.is_zero() {
                    t.push(vec![c.label.clone(), format_rational(y)]);
                }
            }
            t
        }
        FeasibilityResult::Feasible { witness } => {
            let mut t = Table::new(&["variable", "value"]);
            for (v, x) in program.variables.iter().zip(witness) {
                if !x.is_zero() {
                    t.push(vec![v.name.clone(), format_rational(x)]);
                }
            }
            t
        }
    }
}

fn certificate(path: &Path) -> Result<Outcome, CliError> {
    let file = CertificateFile::from_json(&load::read(path)?)?;
    let ok = file.verify();
    let status = match (&file.result, ok) {
        (_, false) => "does NOT verify",
        (FeasibilityResult::Feasible { .. }, true) => "feasible, witness verified exactly",
        (FeasibilityResult::Infeasible { .. }, true) => "infeasible, Farkas certificate verified exactly",
    };
    let text = format!(
        "## Certificate: {}\n\nFile: {}\n\nStatus: {status}\n\n{}",
        file.name,
        path.display(),
        program_table(&file.program, &file.result).to_markdown()
    );
    if !ok {
        return Err(CliError::Unverified(path.to_path_buf()));
    }
    Ok(Outcome { text, established: !file.result.is_feasible() })
}

fn demote(o: Outcome) -> Outcome {
    let mut text = String::new();
    for line in o.text.lines() {
        if line.starts_with('#') {
            text.push('#');
        }
        text.push_str(line);
        text.push('\n');
    }
    Outcome { text, established: o.established }
}

fn run(section: &Section, args: &ReportArgs) -> Result<Outcome, CliError> {
    let md = Format::Md;
    match section {
        Section::Tables => commands::tables(&source("pusey_masanes_fr"), md).map(demote),
        Section::Accessibility => accessibility(),
        Section::Contradiction => commands::contradiction(&source("pusey_masanes_fr"), md).map(demote),
        Section::LfCheck => commands::lf_check(Some("brukner_lf"), md).map(demote),
        Section::Epistemic => {
            let s = lookup("pusey_masanes_fr")?;
            let r = commands::run_epistemic(&s, CutTable::frauchiger_renner(), &[], false)?;
            let established = !r.contradictions.is_empty();
            Ok(demote(Outcome { text: commands::epistemic_markdown(&s.name, &r), established }))
        }
        Section::Marginals => marginals(),
        Section::Fine => fine(),
        Section::Gao => {
            let mut text = String::new();
            for (foliation, policy) in [
                ("debbie_first", Policy::Collapse),
                ("debbie_last", Policy::Collapse),
                ("debbie_first", Policy::Independent),
            ] {
                text.push_str(&demote(commands::gao(3, foliation, policy, args.trials, args.seed, md)?).text);
                text.push('\n');
            }
            Ok(Outcome { text, established: false })
        }
        Section::Guerin => commands::guerin(50, args.seed, md).map(demote),
        Section::Stalkee => stalkee(),
        Section::Certificate(p) => certificate(p),
    }
}

/// Every section computed in parallel, concatenated in fixed order.
pub fn report(args: &ReportArgs) -> Result<Outcome, CliError> {
    let mut sections = vec![
        Section::Tables,
        Section::Accessibility,
        Section::Contradiction,
        Section::LfCheck,
        Section::Epistemic,
        Section::Marginals,
        Section::Fine,
        Section::Gao,
        Section::Guerin,
        Section::Stalkee,
    ];
    sections.extend(args.certs.iter().cloned().map(Section::Certificate));
    let outcomes: Vec<Outcome> = sections.par_iter().map(|s| run(s, args)).collect::<Result<_, _>>()?;
    let mut text = format!(
        "# Extended Wigner's friend report\n\nSeed: {}. Trials: {}. Probabilities are exact rationals where they snap, else 12 significant digits.\n",
        args.seed,
        args.trials,
    );
    let mut established = false;
    for o in outcomes {
        text.push('\n');
        text.push_str(&o.text);
        established |= o.established;
    }
    Ok(Outcome { text, established })
}
