use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use qobserve_cli::{run, Cli, CliError};

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
    let mut outcome = run(&cli);
    if let Some(text) = &outcome.rendered {
        let written = match &cli.global.out {
            Some(path) => std::fs::write(path, text).map_err(|e| CliError::Output {
                path: path.display().to_string(),
                message: e.to_string(),
            }),
            None => std::io::stdout().write_all(text.as_bytes()).map_err(|e| CliError::Output {
                path: "<stdout>".into(),
                message: e.to_string(),
            }),
        };
        if let Err(e) = written {
            outcome.error.get_or_insert(e);
        }
    }
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.exit_code())
}
