use std::process::ExitCode;

use clap::Parser;
use freqsweep::cli::{self, Cli};

fn main() -> ExitCode {
    let args = Cli::parse();
    match cli::run(&args) {
        Ok(outcome) => {
            for line in &outcome.messages {
                eprintln!("{line}");
            }
            ExitCode::from(outcome.exit_code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
