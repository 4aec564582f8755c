use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use stk_harness::{emit_table, format_reports, run_check_suite, run_scenario, HarnessError, Scenario, TableKind};

#[derive(Parser)]
#[command(name = "stk", version, about = "Space-time kinematics scenarios and invariant checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario and write its data table.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the invariant suite.
    Check {
        /// Only checks whose id contains this pattern.
        #[arg(long)]
        filter: Option<String>,
        /// Also write the reports as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
        /// Override a tolerance, `id=value`; repeatable.
        #[arg(long = "tolerance", value_name = "ID=VALUE")]
        tolerances: Vec<String>,
    },
    /// Write a derived table for a scenario.
    Table {
        #[arg(long)]
        kind: String,
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn parse_overrides(items: &[String]) -> Result<BTreeMap<String, f64>, HarnessError> {
    items
        .iter()
        .map(|item| {
            let (id, value) = item
                .split_once('=')
                .ok_or_else(|| HarnessError::Config(format!("tolerance {item:?} is not id=value")))?;
            let value: f64 = value
                .parse()
                .map_err(|_| HarnessError::Config(format!("tolerance {item:?} has a bad value")))?;
            Ok((id.to_string(), value))
        })
        .collect()
}

fn execute(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::Run { scenario, out } => {
            let s = Scenario::from_file(&scenario)?;
            let output = run_scenario(&s)?;
            std::fs::write(&out, output.csv())?;
            print!("{}", format_reports(&output.reports));
            Ok(output.reports.iter().all(|r| r.pass))
        }
        Command::Check { filter, json, tolerances } => {
            let overrides = parse_overrides(&tolerances)?;
            let reports = run_check_suite(filter.as_deref(), &overrides)?;
            print!("{}", format_reports(&reports));
            if let Some(path) = json {
                let text = serde_json::to_string_pretty(&reports).expect("reports serialize");
                std::fs::write(path, text + "\n")?;
            }
            if let Some(r) = reports.iter().find(|r| r.error.is_some()) {
                return Err(HarnessError::Numeric(stk_core::KinematicsError::Integration {
                    s: 0.0,
                    reason: format!("check {} did not complete: {}", r.id, r.error.as_deref().unwrap_or("")),
                }));
            }
            Ok(reports.iter().all(|r| r.pass))
        }
        Command::Table { kind, scenario, out } => {
            let kind: TableKind = kind.parse()?;
            let s = Scenario::from_file(&scenario)?;
            let table = emit_table(kind, &s)?;
            table.write_csv(&s.canonical_json(), &out)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match execute(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
