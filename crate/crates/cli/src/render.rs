use ewf_core::fmt::format_probability;
use ewf_core::scenario::{format_assignment, Assignment, CorrelationTable};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Md,
}

/// Rows of strings under a header; rendered as CSV or a Markdown table.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table { header: header.iter().map(|h| h.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| CliError::Output(e.to_string()))
    }

    pub fn to_markdown(&self) -> String {
        let line = |cells: &[String]| {
            let escaped: Vec<String> = cells.iter().map(|c| c.replace('|', "\\|")).collect();
            format!("| {} |\n", escaped.join(" | "))
        };
        let mut out = line(&self.header);
        out.push_str(&format!("|{}\n", "---|".repeat(self.header.len())));
        for r in &self.rows {
            out.push_str(&line(r));
        }
        out
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Md => Ok(self.to_markdown()),
        }
    }
}

pub fn settings_text(a: &Assignment) -> String {
    if a.is_empty() {
        "-".into()
    } else {
        format_assignment(a)
    }
}

/// One row per joint outcome of each pairwise table.
pub fn correlation_rows(tables: &[CorrelationTable]) -> Table {
    let mut t = Table::new(&["settings", "u", "v", "u_value", "v_value", "probability", "accessibility"]);
    for table in tables {
        let access = match &table.accessibility {
            Some(a) if a.is_accessible() => "accessible".to_string(),
            Some(_) => "inaccessible".to_string(),
            None => "-".to_string(),
        };
        for e in &table.entries {
            t.push(vec![
                settings_text(&table.settings),
                table.variables[0].clone(),
                table.variables[1].clone(),
                e.outcome[0].clone(),
                e.outcome[1].clone(),
                format_probability(e.probability, e.exact.as_ref()),
                access.clone(),
            ]);
        }
    }
    t
}
