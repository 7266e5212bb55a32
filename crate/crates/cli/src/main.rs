//! `mortgage-val`: closed-form perpetual mortgage valuation from the command line.
//!
//! Rates are decimals (`--m 0.0326`), never percents. Results go to stdout as JSON
//! (or TSV for `sweep`); failures go to stderr as `{"error": code, "detail": ...}`.
//! Exit codes: 0 success, 1 numerical or oracle-check failure, 2 invalid input.
//!
//! ```bash
//! mortgage-val solve --contract frm --r 0.017825 --delta 0.045 --sigma 0.1125 --b0 0.9 --m 0.0326
//! mortgage-val sweep --config base.json --quantity spread --x phi --x-min 0.05 --x-max 0.6 --steps 55
//! ```

mod args;
mod commands;
mod error;
mod output;

use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};
use serde_json::{Map, Value};

use args::{merge, AlphaStarArgs, OracleArgs, ScheduleArgs, SolveArgs, SweepArgs};
use error::CliError;

#[derive(Parser)]
#[command(name = "mortgage-val", version, about = "Perpetual FRM, ABM and APRM mortgage valuation")]
struct Cli {
    /// JSON object with the same keys as the flags; flags take precedence
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one contract: regions, boundaries, exponents and the value at --h
    Solve(SolveArgs),
    /// Tabulate a quantity over a range of one input as TSV
    Sweep(SweepArgs),
    /// Rate regime, m* and the sharing threshold alpha* of the APRM
    AlphaStar(AlphaStarArgs),
    /// Compare the closed form with the PSOR, threshold-policy and Monte Carlo oracles
    OracleCheck(OracleArgs),
    /// Finite-maturity balance and coupon at time --t
    Schedule(ScheduleArgs),
}

fn load_config(path: &PathBuf) -> Result<Map<String, Value>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    match serde_json::from_str(&text)? {
        Value::Object(map) => Ok(map),
        _ => Err(CliError::Config(format!("{} must contain a JSON object", path.display()))),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let config = cli.config.as_ref().map(load_config).transpose()?;
    let config = config.as_ref();
    let mut out = io::stdout().lock();
    match cli.command {
        Command::Solve(a) => commands::cmd_solve(&merge(&a, config)?, &mut out),
        Command::Sweep(a) => commands::cmd_sweep(&merge(&a, config)?, &mut out, &mut io::stderr().lock()),
        Command::AlphaStar(a) => commands::cmd_alpha_star(&merge(&a, config)?, &mut out),
        Command::OracleCheck(a) => commands::cmd_oracle_check(&merge(&a, config)?, &mut out),
        Command::Schedule(a) => commands::cmd_schedule(&merge(&a, config)?, &mut out),
    }
}

fn report(code: &str, detail: String) {
    let payload = serde_json::json!({ "error": code, "detail": detail });
    let _ = writeln!(io::stderr(), "{payload}");
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            report("Usage", e.render().to_string().trim().to_string());
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::CheckFailed) => ExitCode::from(1),
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            report(e.code(), e.to_string());
            ExitCode::from(e.exit_code())
        }
    }
}
