mod args;
mod commands;
mod error;
mod manifest;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::CliError;

fn run(cli: Cli) -> Result<manifest::Manifest, CliError> {
    match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Reconstruct(a) => commands::reconstruct_cmd(a),
        Command::Stress(a) => commands::stress(a),
        Command::SweepFeasibility(a) => commands::sweep_feasibility_cmd(a),
        Command::SweepContagion(a) => commands::sweep_contagion_cmd(a),
        Command::Fit(a) => commands::fit(a),
        Command::Replay(a) => commands::replay(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match run(cli) {
        Ok(m) => {
            for o in &m.outputs {
                println!("{o}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
