use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use sublin_lab::cli::{Cli, Command};
use sublin_lab::table::{self, validate_round_trip};
use sublin_lab::{Error, Outcome, Result};

fn output_of(cmd: &Command) -> &sublin_lab::cli::Output {
    match cmd {
        Command::Solve(a) => &a.output,
        Command::Constants(a) => &a.output,
        Command::Maximal(a) => &a.output,
        Command::Verify(a) => &a.output,
    }
}

fn emit(cmd: &Command, outcome: &Outcome) -> Result<()> {
    let out = output_of(cmd);
    if let Some(path) = &out.csv {
        let text = outcome.table.to_csv()?;
        table::write_atomic(path, text.as_bytes())?;
        let back = std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.clone(), source })?;
        validate_round_trip(&back, &outcome.table)?;
    }
    let json = outcome.report.to_json();
    match &out.out {
        Some(path) => table::write_atomic(path, json.as_bytes()),
        None => std::io::stdout()
            .write_all(json.as_bytes())
            .map_err(|source| Error::Write { path: "<stdout>".into(), source }),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = sublin_lab::run(&cli.command).and_then(|o| emit(&cli.command, &o).map(|_| o.report.exit_code));
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
