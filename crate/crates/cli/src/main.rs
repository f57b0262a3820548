mod commands;
mod config;
mod error;
mod output;

use std::process::ExitCode;

use clap::Parser;

use config::{Cli, CommandConfig, ExperimentConfig};
use error::{CliError, CliResult};

fn run(cli: Cli) -> CliResult<()> {
    let dump = cli.dump_config;
    let cfg = ExperimentConfig::resolve(cli)?;
    if dump {
        let text = toml::to_string(&cfg.to_file()).map_err(|e| CliError::Output(e.to_string()))?;
        print!("{text}");
        return Ok(());
    }
    let report = match &cfg.command {
        CommandConfig::Equilibria(c) => commands::equilibria(c)?,
        CommandConfig::Cells(c) => commands::cells(c)?,
        CommandConfig::Imprint(c) => commands::imprint(c)?,
        CommandConfig::Simulate(c) => {
            let (report, summary) = commands::simulate(c, cfg.seed)?;
            let text = output::envelope(&cfg, &summary)?;
            match &c.summary {
                Some(path) => std::fs::write(path, text)?,
                None => eprint!("{text}"),
            }
            report
        }
    };
    output::write(&cfg, &report)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
