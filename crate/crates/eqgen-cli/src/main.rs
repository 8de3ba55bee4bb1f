mod args;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use crate::args::Cli;
use crate::commands::Failure;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let mut stdout = std::io::stdout().lock();
    match commands::run(&cli, &mut stdout) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            if let Some(message) = failure.message() {
                eprintln!("{message}");
            }
            ExitCode::from(failure.exit_code())
        }
    }
}

impl Failure {
    fn message(&self) -> Option<String> {
        match self {
            Failure::Usage(m) => Some(format!("error[usage]: {m}")),
            Failure::Library(e) => Some(format!("error[{}]: {e}", e.kind())),
            Failure::Empty(what) => Some(format!("note: {what}")),
        }
    }
}
