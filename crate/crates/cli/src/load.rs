use std::path::{Path, PathBuf};

use ewf_core::scenario::{
    event_distribution, lookup, parse_assignment, realized_binding, validate_json, Assignment, CorrelationTable, Scenario,
};

use crate::error::CliError;

pub fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

/// A built-in name such as `gao(3, debbie_first)`, or a path to a scenario JSON file.
pub fn scenario(spec: &str) -> Result<Scenario, CliError> {
    let path = Path::new(spec);
    if path.is_file() || spec.ends_with(".json") {
        let text = read(path)?;
        return validate_json(&text).map_err(|diagnostics| CliError::Invalid { path: PathBuf::from(spec), diagnostics });
    }
    Ok(lookup(spec)?)
}

pub fn assignments(s: &Scenario, settings: Option<&str>) -> Result<Vec<Assignment>, CliError> {
    match settings {
        Some(text) => Ok(vec![parse_assignment(text)?]),
        None => Ok(s.all_assignments()),
    }
}

/// `c:d,c:b` into pairs.
pub fn pairs(text: &str) -> Result<Vec<(String, String)>, CliError> {
    text.split(',')
        .map(str::trim)
        .filter(|p| !p.is_empty())
        .map(|p| {
            p.split_once(':')
                .map(|(u, v)| (u.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| CliError::Usage(format!("pair `{p}` is not of the form u:v")))
        })
        .collect()
}

/// Realized variables grouped by the site of their event, sites in first-seen order.
fn by_site(s: &Scenario, a: &Assignment) -> Vec<(String, Vec<String>)> {
    let mut groups: Vec<(String, Vec<String>)> = Vec::new();
    for v in &s.outcomes {
        let Ok(id) = realized_binding(s, a, &v.name) else { continue };
        let site = s.event(&id).map(|e| e.site.clone()).unwrap_or_default();
        match groups.iter_mut().find(|(g, _)| *g == site) {
            Some((_, vars)) => vars.push(v.name.clone()),
            None => groups.push((site, vec![v.name.clone()])),
        }
    }
    groups
}

/// Every pair of realized variables recorded at different sites, earlier site
/// first; every pair when all records share one site.
pub fn default_pairs(s: &Scenario, a: &Assignment) -> Vec<(String, String)> {
    let groups = by_site(s, a);
    let mut out = Vec::new();
    if groups.len() > 1 {
        for (i, (_, us)) in groups.iter().enumerate() {
            for (_, vs) in &groups[i + 1..] {
                for u in us {
                    out.extend(vs.iter().map(|v| (u.clone(), v.clone())));
                }
            }
        }
    } else if let Some((_, vars)) = groups.first() {
        for (i, u) in vars.iter().enumerate() {
            out.extend(vars[i + 1..].iter().map(|v| (u.clone(), v.clone())));
        }
    }
    out
}

pub fn pair_tables(s: &Scenario, a: &Assignment, pairs: &[(String, String)]) -> Result<Vec<CorrelationTable>, CliError> {
    pairs.iter().map(|(u, v)| Ok(event_distribution(s, a, &[u.as_str(), v.as_str()])?)).collect()
}

pub fn pairs_for(s: &Scenario, a: &Assignment, given: Option<&str>) -> Result<Vec<(String, String)>, CliError> {
    match given {
        Some(text) => pairs(text),
        None => Ok(default_pairs(s, a)),
    }
}
