use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

mod cli;
mod commands;
mod error;
mod load;
mod render;
mod report;

use cli::{Cli, Command};
use commands::{FeasibilityArgs, Outcome};
use error::CliError;
use render::Format;

fn execute(command: Command) -> Result<(Outcome, Option<std::path::PathBuf>), CliError> {
    let fmt = |o: &cli::Output, default: Format| o.format.unwrap_or(default);
    Ok(match command {
        Command::Scenarios => (commands::scenarios(), None),
        Command::Tables { source, output } => (commands::tables(&source, fmt(&output, Format::Csv))?, output.out),
        Command::Contradiction { source, output } => (commands::contradiction(&source, fmt(&output, Format::Md))?, output.out),
        Command::Epistemic { scenario, cuts, ablate, lift_all, output } => (
            commands::epistemic(scenario.as_deref(), cuts.as_deref(), &ablate, lift_all, fmt(&output, Format::Md))?,
            output.out,
        ),
        Command::Feasibility { source, drop, behavior, povm, cert, output } => {
            let args = FeasibilityArgs {
                source: &source,
                drop: &drop,
                behavior: behavior.as_deref(),
                povm: povm.as_deref(),
                cert: cert.as_deref(),
            };
            (commands::feasibility(args, fmt(&output, Format::Md))?, output.out)
        }
        Command::LfCheck { scenario, output } => (commands::lf_check(scenario.as_deref(), fmt(&output, Format::Md))?, output.out),
        Command::Gao { k, foliation, policy, trials, seed, output } => {
            (commands::gao(k, &foliation, policy, trials, seed, fmt(&output, Format::Csv))?, output.out)
        }
        Command::Guerin { samples, seed, output } => (commands::guerin(samples, seed, fmt(&output, Format::Md))?, output.out),
        Command::Report { seed, trials, cert, out } => {
            (report::report(&report::ReportArgs { seed, trials, certs: cert })?, out)
        }
        Command::Validate { file } => (commands::validate(&file)?, None),
        Command::Export { scenario, out } => (commands::export(&scenario)?, out),
    })
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|source| CliError::Write { path: path.to_path_buf(), source }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match execute(cli.command).and_then(|(o, out)| emit(&o.text, out.as_deref()).map(|_| o)) {
        Ok(o) if o.established => ExitCode::from(2),
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
