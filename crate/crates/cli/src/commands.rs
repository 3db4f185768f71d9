use std::fmt::Write as _;

use ewf_core::epistemic::{
    detect_contradictions, infer_fixpoint, seed_knowledge, Ablation, Contradiction, CutTable, EngineConfig, LiftScope,
    Protocol,
};
use ewf_core::feasibility::{
    fine_membership, guerin_marginal_check, pairwise_marginal_feasibility, povm_joint_feasibility, CertificateFile,
    FeasibilityResult, MarginalResult, MarginalSpec, PovmResult, QubitMeasurementPair, MARGINAL_TOL,
};
use ewf_core::fmt::{format_probability, format_sig12};
use ewf_core::possibilistic::{extract_implications, find_contradiction, ContradictionReport};
use ewf_core::qcore::random::random_density;
use ewf_core::qcore::{format_rational, NamedBasis, ProjectiveBasis};
use ewf_core::scenario::{
    gao_run, local_agency_report, tracking_check, Assignment, Behavior, CorrelationTable, EventKind, Foliation,
    GaoPolicy, Scenario, CATALOGUE_NAMES,
};
use ewf_core::Exec;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cli::{Policy, Source};
use crate::error::CliError;
use crate::load;
use crate::render::{correlation_rows, settings_text, Format, Table};

/// Rendered text, and whether the analysis established a contradiction or infeasibility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub text: String,
    pub established: bool,
}

impl Outcome {
    fn clear(text: String) -> Self {
        Outcome { text, established: false }
    }
}

pub const NO_CONTRADICTION: &str = "no contradiction";

fn scenario_or(source: Option<&str>, default: &str) -> Result<Scenario, CliError> {
    load::scenario(source.unwrap_or(default))
}

pub fn scenarios() -> Outcome {
    let mut text = String::new();
    for n in CATALOGUE_NAMES {
        text.push_str(n);
        text.push('\n');
    }
    Outcome::clear(text)
}

pub fn tables(source: &Source, format: Format) -> Result<Outcome, CliError> {
    let s = scenario_or(source.scenario.as_deref(), "pusey_masanes_fr")?;
    let mut all = Vec::new();
    for a in load::assignments(&s, source.settings.as_deref())? {
        let pairs = load::pairs_for(&s, &a, source.pairs.as_deref())?;
        all.extend(load::pair_tables(&s, &a, &pairs)?);
    }
    let table = correlation_rows(&all).render(format)?;
    Ok(Outcome::clear(match format {
        Format::Csv => table,
        Format::Md => format!("# Pairwise tables: {}\n\n{table}", s.name),
    }))
}

/// First chain found, per assignment in order, then across the four contexts
/// of a single cross-site pair.
pub fn find_chain(s: &Scenario, source: &Source) -> Result<Option<(Vec<CorrelationTable>, ContradictionReport)>, CliError> {
    let assignments = load::assignments(s, source.settings.as_deref())?;
    let mut single_pair = None;
    for a in &assignments {
        let pairs = load::pairs_for(s, a, source.pairs.as_deref())?;
        if pairs.len() == 1 {
            single_pair = Some(pairs[0].clone());
        }
        let tables = load::pair_tables(s, a, &pairs)?;
        if let Some(r) = find_contradiction(&extract_implications(&tables)?) {
            return Ok(Some((tables, r)));
        }
    }
    if let (Some((u, v)), None, true) = (single_pair, &source.settings, s.settings.len() == 2) {
        let tables = Behavior::from_scenario(s, &u, &v)?.context_tables();
        if let Some(r) = find_contradiction(&extract_implications(&tables)?) {
            return Ok(Some((tables, r)));
        }
    }
    Ok(None)
}

fn chain_table(r: &ContradictionReport) -> Table {
    let mut t = Table::new(&["step", "settings", "prediction", "implication"]);
    for (i, e) in r.chain.iter().enumerate() {
        t.push(vec![(i + 1).to_string(), settings_text(&e.source.settings), format!("{} = 0", e.source), format!("{} ⟹ {}", e.from, e.to)]);
    }
    let last = &r.chain.last().expect("non-empty chain").to;
    t.push(vec![
        (r.chain.len() + 1).to_string(),
        settings_text(&r.support.entry.settings),
        format!("{} = {} > 0", r.support.entry, format_rational(&r.support.probability)),
        format!("contradicts {last}"),
    ]);
    t
}

pub fn contradiction(source: &Source, format: Format) -> Result<Outcome, CliError> {
    let s = scenario_or(source.scenario.as_deref(), "pusey_masanes_fr")?;
    let Some((_, r)) = find_chain(&s, source)? else {
        return Ok(Outcome::clear(match format {
            Format::Csv => Table::new(&["step", "settings", "prediction", "implication"]).to_csv()?,
            Format::Md => format!("# Possibilistic contradiction: {}\n\n{NO_CONTRADICTION}\n", s.name),
        }));
    };
    let text = match format {
        Format::Csv => chain_table(&r).to_csv()?,
        Format::Md => {
            let mut out = format!("# Possibilistic contradiction: {}\n\n{}\n", s.name, r.to_markdown());
            out.push_str("Derivation:\n\n");
            for (i, line) in r.derivation.iter().enumerate() {
                let _ = writeln!(out, "{}. {line}", i + 1);
            }
            out
        }
    };
    Ok(Outcome { text, established: true })
}

pub struct EpistemicRun {
    pub cuts: CutTable,
    pub ablations: Vec<String>,
    pub seeds: usize,
    pub families: usize,
    pub statements: usize,
    pub contradictions: Vec<Contradiction>,
}

pub fn run_epistemic(s: &Scenario, cuts: CutTable, ablate: &[String], lift_all: bool) -> Result<EpistemicRun, CliError> {
    let mut protocol = Protocol::frauchiger_renner();
    if lift_all {
        protocol.lift = LiftScope::AllPairs;
    }
    let mut seeds = seed_knowledge(s, &cuts, &protocol)?;
    let mut config = EngineConfig::default();
    for a in ablate {
        match a.parse::<Ablation>()? {
            Ablation::Consistency => config = config.without_consistency(),
            Ablation::Rule(r) => config = config.without(r),
            Ablation::Seed(f) => seeds = seeds.without_family(&f)?,
        }
    }
    let kb = infer_fixpoint(&seeds, &cuts, &config)?;
    kb.replay(&cuts, &config)?;
    Ok(EpistemicRun {
        cuts,
        ablations: ablate.to_vec(),
        seeds: seeds.len(),
        families: seeds.families().len(),
        statements: kb.len(),
        contradictions: detect_contradictions(&kb),
    })
}

pub fn epistemic_markdown(name: &str, run: &EpistemicRun) -> String {
    let mut out = format!("# Epistemic analysis: {name}\n\nCut table:\n\n{}\n", run.cuts);
    let ablations = if run.ablations.is_empty() { "none".to_string() } else { run.ablations.join(", ") };
    let _ = writeln!(out, "Ablations: {ablations}\n");
    let _ = writeln!(out, "Seeds: {} in {} families; {} statements at the fixpoint.\n", run.seeds, run.families, run.statements);
    if run.contradictions.is_empty() {
        out.push_str(NO_CONTRADICTION);
        out.push('\n');
    }
    for c in &run.contradictions {
        let _ = writeln!(out, "Contradiction: {} knows {} = {{{}}}\n", c.agent, c.variable, c.values.join(", "));
        for d in &c.derivations {
            out.push_str(&d.linearize().to_markdown());
        }
    }
    out
}

pub fn epistemic(
    scenario: Option<&str>,
    cuts: Option<&std::path::Path>,
    ablate: &[String],
    lift_all: bool,
    format: Format,
) -> Result<Outcome, CliError> {
    let s = scenario_or(scenario, "pusey_masanes_fr")?;
    let cuts = match cuts {
        Some(p) => CutTable::from_json(&load::read(p)?)?,
        None => CutTable::frauchiger_renner(),
    };
    let run = run_epistemic(&s, cuts, ablate, lift_all)?;
    let established = !run.contradictions.is_empty();
    let text = match format {
        Format::Md => epistemic_markdown(&s.name, &run),
        Format::Csv => {
            let mut t = Table::new(&["agent", "variable", "value", "step", "statement", "rule", "premises"]);
            for c in &run.contradictions {
                for (value, d) in c.values.iter().zip(&c.derivations) {
                    for step in d.linearize().steps {
                        let premises: Vec<String> = step.premises.iter().map(|(p, _)| p.to_string()).collect();
                        t.push(vec![
                            c.agent.clone(),
                            c.variable.clone(),
                            value.clone(),
                            step.number.to_string(),
                            step.statement.to_string(),
                            step.rule.code().to_string(),
                            premises.join("; "),
                        ]);
                    }
                }
            }
            t.to_csv()?
        }
    };
    Ok(Outcome { text, established })
}

/// Nonzero Farkas multipliers, or the witness support.
pub fn result_table(r: &MarginalResult) -> Table {
    match &r.result {
        FeasibilityResult::Infeasible { certificate } => {
            let mut t = Table::new(&["constraint", "multiplier"]);
            for (c, y) in r.program.constraints.iter().zip(&certificate.multipliers) {
                if !y.is_zero() {
                    t.push(vec![c.label.clone(), format_rational(y)]);
                }
            }
            t
        }
        FeasibilityResult::Feasible { .. } => {
            let joint = r.joint.as_ref().expect("feasible results decode a joint");
            let mut header: Vec<&str> = joint.variables.iter().map(String::as_str).collect();
            header.push("probability");
            let mut t = Table::new(&header);
            for (a, p) in joint.support() {
                let mut row = a.clone();
                row.push(format_rational(p));
                t.push(row);
            }
            t
        }
    }
}

/// Witness marginals on dropped pairs next to their Born laws.
fn omitted_tables(r: &MarginalResult, dropped: &[(String, String)], born: &MarginalSpec) -> Vec<(String, Table)> {
    let Some(joint) = &r.joint else { return Vec::new() };
    dropped
        .iter()
        .map(|(u, v)| {
            let mut t = Table::new(&[u, v, "witness", "born"]);
            let target = born.targets.iter().find(|t| t.pair == (u.clone(), v.clone()));
            for ((x, y), p) in joint.marginal(u, v) {
                let b = target
                    .and_then(|t| t.law.iter().find(|(k, _)| *k == (x.clone(), y.clone())))
                    .map_or("-".to_string(), |(_, q)| format_rational(q));
                t.push(vec![x, y, format_rational(&p), b]);
            }
            (format!("Omitted law p({u}, {v}): witness marginal against the Born table"), t)
        })
        .collect()
}

fn povm_pair(text: &str) -> Result<QubitMeasurementPair, CliError> {
    let basis = |name: &str| -> Result<ProjectiveBasis, CliError> {
        let (base, swapped) = match name.strip_suffix("_swapped") {
            Some(b) => (b, true),
            None => (name, false),
        };
        let b = match base {
            "computational" => ProjectiveBasis::named(NamedBasis::Computational),
            "plus_minus" => ProjectiveBasis::named(NamedBasis::PlusMinus),
            other => return Err(CliError::Usage(format!("unknown basis `{other}`"))),
        };
        Ok(if swapped { b.relabeled_swapped() } else { b })
    };
    let (a, b) = text.split_once(',').ok_or_else(|| CliError::Usage(format!("--povm expects two bases, got `{text}`")))?;
    Ok(QubitMeasurementPair::new(basis(a.trim())?, basis(b.trim())?)?)
}

pub fn povm_markdown(label: &str, r: &PovmResult) -> String {
    let mut out = format!("Bases: {label}\n\n");
    let decision = if r.feasible { "jointly measurable" } else { "not jointly measurable" };
    let _ = writeln!(out, "- commutator norm: {}", format_sig12(r.commutator_norm));
    let _ = writeln!(out, "- analytic criterion: {decision}");
    let _ = writeln!(out, "- oracle max-min eigenvalue: {}", format_sig12(r.oracle.max_min_eigenvalue));
    let arg: Vec<String> = r.oracle.argmax.iter().map(|x| format_sig12(*x)).collect();
    let _ = writeln!(out, "- oracle argmax (t, x, y, z): ({})", arg.join(", "));
    let _ = writeln!(out, "- methods agree: {}", r.methods_agree());
    if let Some(w) = &r.witness {
        out.push_str("\nWitness effects E_ij (row i: first basis, column j: second basis):\n\n");
        for (i, row) in w.iter().enumerate() {
            for (j, e) in row.iter().enumerate() {
                let m = e.matrix();
                let cell = |k: usize, l: usize| {
                    let z = m[(k, l)];
                    if z.im.abs() < 1e-15 {
                        format_sig12(z.re)
                    } else {
                        format!("{}{:+}i", format_sig12(z.re), format_sig12(z.im))
                    }
                };
                let _ = writeln!(out, "- E_{i}{j} = [[{}, {}], [{}, {}]]", cell(0, 0), cell(0, 1), cell(1, 0), cell(1, 1));
            }
        }
    }
    out
}

fn parse_behavior(text: &str) -> Result<Behavior, CliError> {
    match text {
        "hardy" => Ok(Behavior::hardy()),
        "pr_box" => Ok(Behavior::pr_box()),
        other => {
            let bits = other
                .strip_prefix("deterministic:")
                .filter(|b| b.len() == 4 && b.chars().all(|c| c == '0' || c == '1'))
                .ok_or_else(|| CliError::Usage(format!("unknown behavior `{other}`")))?;
            let d: Vec<usize> = bits.chars().map(|c| (c == '1') as usize).collect();
            Ok(Behavior::deterministic(d[0], d[1], d[2], d[3]))
        }
    }
}

pub struct FeasibilityArgs<'a> {
    pub source: &'a Source,
    pub drop: &'a [String],
    pub behavior: Option<&'a str>,
    pub povm: Option<&'a str>,
    pub cert: Option<&'a std::path::Path>,
}

pub fn pm_spec(s: &Scenario, a: &Assignment, pairs: &[(String, String)]) -> Result<MarginalSpec, CliError> {
    let refs: Vec<(&str, &str)> = pairs.iter().map(|(u, v)| (u.as_str(), v.as_str())).collect();
    Ok(MarginalSpec::from_scenario(s, a, &refs)?)
}

pub fn feasibility(args: FeasibilityArgs<'_>, format: Format) -> Result<Outcome, CliError> {
    if let Some(text) = args.povm {
        let r = povm_joint_feasibility(&povm_pair(text)?)?;
        let out = match format {
            Format::Md => format!("# Joint measurability\n\n{}", povm_markdown(text, &r)),
            Format::Csv => {
                let mut t = Table::new(&["bases", "commutator_norm", "analytic", "oracle_max_min_eigenvalue", "oracle", "agree"]);
                let word = |b: bool| if b { "feasible" } else { "infeasible" }.to_string();
                t.push(vec![
                    text.to_string(),
                    format_sig12(r.commutator_norm),
                    word(r.feasible),
                    format_sig12(r.oracle.max_min_eigenvalue),
                    word(r.oracle.feasible),
                    r.methods_agree().to_string(),
                ]);
                t.to_csv()?
            }
        };
        return Ok(Outcome { text: out, established: !r.feasible });
    }
    let (title, r, extra) = if let Some(name) = args.behavior {
        let r = fine_membership(&parse_behavior(name)?)?;
        (format!("Local-polytope membership: {name}"), r, Vec::new())
    } else {
        let s = scenario_or(args.source.scenario.as_deref(), "pusey_masanes_fr")?;
        let a = match args.source.settings.as_deref() {
            Some(text) => load::assignments(&s, Some(text))?.remove(0),
            None => s.all_assignments().pop().expect("at least the empty assignment"),
        };
        let pairs = load::pairs_for(&s, &a, args.source.pairs.as_deref())?;
        let born = pm_spec(&s, &a, &pairs)?;
        let dropped = args.drop.iter().map(|d| load::pairs(d)).collect::<Result<Vec<_>, _>>()?.concat();
        let mut spec = born.clone();
        for (u, v) in &dropped {
            spec = spec.without_pair(u, v);
        }
        let r = pairwise_marginal_feasibility(&spec)?;
        let extra = omitted_tables(&r, &dropped, &born);
        let laws: Vec<String> = spec.targets.iter().map(|t| format!("({}, {})", t.pair.0, t.pair.1)).collect();
        (format!("Marginal feasibility: {} at {} with laws {}", s.name, settings_text(&a), laws.join(", ")), r, extra)
    };
    if !r.verified() {
        return Err(CliError::Output("solver result failed exact re-verification".into()));
    }
    if let Some(path) = args.cert {
        let file = CertificateFile::new(&title, &r);
        std::fs::write(path, file.to_json()).map_err(|source| CliError::Write { path: path.to_path_buf(), source })?;
    }
    let main = result_table(&r);
    let text = match format {
        Format::Csv => main.to_csv()?,
        Format::Md => {
            let status = if r.is_feasible() {
                "feasible; the witness below satisfies every constraint exactly"
            } else {
                "infeasible; the Farkas multipliers below combine the constraints into 0 <= -1"
            };
            let mut out = format!("# {title}\n\nResult: {status}.\n\n{}", main.to_markdown());
            for (heading, t) in extra {
                let _ = write!(out, "\n{heading}:\n\n{}", t.to_markdown());
            }
            out
        }
    };
    Ok(Outcome { text, established: !r.is_feasible() })
}

pub fn lf_check(scenario: Option<&str>, format: Format) -> Result<Outcome, CliError> {
    let s = scenario_or(scenario, "brukner_lf")?;
    let report = local_agency_report(&s)?;
    let mut checks = Table::new(&["pair", "varied", "holds", "max_deviation"]);
    for c in &report.checks {
        checks.push(vec![
            format!("({}, {})", c.variables.0, c.variables.1),
            c.varied.clone(),
            c.holds.to_string(),
            format_sig12(c.max_deviation),
        ]);
    }
    let mut tracking = Table::new(&["copy", "tracks"]);
    let mut all_track = true;
    for e in &s.events {
        if let EventKind::Copy { .. } = e.kind {
            let ok = tracking_check(&s, &e.id)?;
            all_track &= ok;
            tracking.push(vec![e.id.clone(), ok.to_string()]);
        }
    }
    let chain = find_contradiction(&extract_implications(&report.tables)?);
    let established = report.all_hold() && all_track && chain.is_some();
    let text = match format {
        Format::Csv => checks.to_csv()?,
        Format::Md => {
            let mut out = format!("# Local Agency checks: {}\n\n{}\n", s.name, checks.to_markdown());
            let _ = write!(out, "Tracking:\n\n{}\n", tracking.to_markdown());
            out.push_str(&correlation_rows(&report.tables).to_markdown());
            out.push('\n');
            match &chain {
                Some(r) => out.push_str(&r.to_markdown()),
                None => {
                    out.push_str(NO_CONTRADICTION);
                    out.push('\n');
                }
            }
            out
        }
    };
    Ok(Outcome { text, established })
}

pub fn gao(k: usize, foliation: &str, policy: Policy, trials: u64, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let f = Foliation::parse(foliation).ok_or_else(|| CliError::Usage(format!("unknown foliation `{foliation}`")))?;
    let p = match policy {
        Policy::Collapse => GaoPolicy::CollapseOrdered(f),
        Policy::Independent => GaoPolicy::IndependentBorn,
    };
    let run = gao_run(p, k, trials, seed, Exec::Parallel)?;
    let mut header: Vec<&str> = run.variables.iter().map(String::as_str).collect();
    header.extend(["count", "frequency", "exact"]);
    let mut t = Table::new(&header);
    for (i, (o, n)) in run.counts.iter().enumerate() {
        let mut row = o.clone();
        row.push(n.to_string());
        row.push(format_sig12(*n as f64 / trials as f64));
        let exact = run.exact.as_ref().map(|e| &e.entries[i]);
        row.push(exact.map_or("-".to_string(), |e| format_probability(e.probability, e.exact.as_ref())));
        t.push(row);
    }
    let text = match format {
        Format::Csv => t.to_csv()?,
        Format::Md => {
            let policy = match p {
                GaoPolicy::CollapseOrdered(f) => format!("collapse-ordered ({})", f.name()),
                GaoPolicy::IndependentBorn => "independent Born".to_string(),
            };
            let mut out = format!("# Sequential measurements: k={k}, {policy}, {trials} trials, seed {seed}\n\n{}", t.to_markdown());
            let _ = write!(
                out,
                "\np(c{k} != d) = {}\np(c1 = ... = c{k} != d) = {}\n",
                format_sig12(run.last_differs_from_d()),
                format_sig12(run.all_equal_opposite_d())
            );
            out
        }
    };
    Ok(Outcome::clear(text))
}

pub fn guerin(samples: usize, seed: u64, format: Format) -> Result<Outcome, CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = Table::new(&["sample", "p(f1=0)", "Tr(|0><0| rho)", "p(f2=+)", "Tr(|+><+| rho)", "max_deviation", "holds"]);
    let mut all = true;
    for i in 0..samples {
        let r = guerin_marginal_check(&random_density(&mut rng, "S"))?;
        all &= r.holds;
        t.push(vec![
            i.to_string(),
            format_sig12(r.f1[0]),
            format_sig12(r.closed_f1[0]),
            format_sig12(r.f2[0]),
            format_sig12(r.closed_f2[0]),
            format_sig12(r.max_deviation),
            r.holds.to_string(),
        ]);
    }
    let pair = povm_pair("computational,plus_minus")?;
    let povm = povm_joint_feasibility(&pair)?;
    let established = all && !povm.feasible && povm.methods_agree();
    let text = match format {
        Format::Csv => t.to_csv()?,
        Format::Md => format!(
            "# Measure, undo, re-measure\n\nTolerance: {}\n\n{}\n## Joint POVM for both readouts\n\n{}",
            format_sig12(MARGINAL_TOL),
            t.to_markdown(),
            povm_markdown("computational,plus_minus", &povm)
        ),
    };
    Ok(Outcome { text, established })
}

/// `file` round trip plus diagnostics.
pub fn validate(path: &std::path::Path) -> Result<Outcome, CliError> {
    let s = load::scenario(&path.to_string_lossy())?;
    Ok(Outcome::clear(format!("{}: valid scenario `{}`\n", path.display(), s.name)))
}

pub fn export(name: &str) -> Result<Outcome, CliError> {
    Ok(Outcome::clear(load::scenario(name)?.to_json()))
}
